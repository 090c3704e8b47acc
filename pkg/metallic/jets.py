"""
Second-order forward-mode jets.

A Jet2 carries the value, gradient and Hessian of a scalar function at a
point. Arithmetic follows the Leibniz and chain rules, so any composition of
the supported operations is differentiated exactly up to rounding. Hessians
are built only from symmetric terms and stay exactly symmetric.
"""

import math
from typing import Sequence, Tuple

import numpy as np

from .domain import DomainError


class Jet2:
    """Value, gradient and Hessian of a scalar at a point."""

    __slots__ = ("value", "gradient", "hessian")

    def __init__(self, value: float, gradient: np.ndarray, hessian: np.ndarray):
        self.value = float(value)
        self.gradient = gradient
        self.hessian = hessian

    @property
    def dim(self) -> int:
        return int(self.gradient.shape[0])

    @classmethod
    def constant(cls, value: float, dim: int) -> "Jet2":
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def variable(cls, value: float, index: int, dim: int) -> "Jet2":
        gradient = np.zeros(dim)
        gradient[index] = 1.0
        return cls(value, gradient, np.zeros((dim, dim)))

    def is_constant(self) -> bool:
        return not self.gradient.any() and not self.hessian.any()

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient!r})"

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.gradient, self.hessian)
        return Jet2(
            self.value + other.value,
            self.gradient + other.gradient,
            self.hessian + other.hessian,
        )

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value - other, self.gradient, self.hessian)
        return Jet2(
            self.value - other.value,
            self.gradient - other.gradient,
            self.hessian - other.hessian,
        )

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.gradient * other, self.hessian * other)
        cross = np.outer(self.gradient, other.gradient)
        return Jet2(
            self.value * other.value,
            self.value * other.gradient + other.value * self.gradient,
            self.value * other.hessian
            + other.value * self.hessian
            + (cross + cross.T),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if other == 0:
                raise DomainError("Division by zero")
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            if exponent.is_constant():
                return self.power(exponent.value)
            if self.value <= 0.0:
                raise DomainError(
                    f"Variable exponent needs a positive base, got {self.value!r}"
                )
            return (exponent * self.log()).exp()
        return self.power(float(exponent))

    def chain(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Compose with a scalar function given its value and two derivatives."""
        return Jet2(
            f0,
            f1 * self.gradient,
            f1 * self.hessian + f2 * np.outer(self.gradient, self.gradient),
        )

    def reciprocal(self) -> "Jet2":
        u = self.value
        if u == 0.0:
            raise DomainError("Division by zero")
        return self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))

    def power(self, c: float) -> "Jet2":
        u = self.value
        if c == 0.0:
            return Jet2.constant(1.0, self.dim)
        if c == 1.0:
            return self
        if u < 0.0 and not float(c).is_integer():
            raise DomainError(f"Negative base {u!r} raised to non-integer power {c!r}")
        if u == 0.0:
            if c < 2.0:
                raise DomainError(f"Power {c!r} is not twice differentiable at zero")
            return self.chain(0.0, 0.0, 2.0 if c == 2.0 else 0.0)
        try:
            f0 = u**c
            f1 = c * u ** (c - 1.0)
            f2 = c * (c - 1.0) * u ** (c - 2.0)
        except OverflowError as e:
            raise DomainError(f"Cannot raise {u!r} to {c!r}: {e}") from e
        return self.chain(f0, f1, f2)

    def sqrt(self) -> "Jet2":
        u = self.value
        if u <= 0.0:
            raise DomainError(f"sqrt of non-positive value {u!r}")
        r = math.sqrt(u)
        return self.chain(r, 0.5 / r, -0.25 / (r * u))

    def exp(self) -> "Jet2":
        try:
            e = math.exp(self.value)
        except OverflowError as exc:
            raise DomainError(f"exp overflow at {self.value!r}") from exc
        return self.chain(e, e, e)

    def log(self) -> "Jet2":
        u = self.value
        if u <= 0.0:
            raise DomainError(f"log of non-positive value {u!r}")
        return self.chain(math.log(u), 1.0 / u, -1.0 / (u * u))

    def sin(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self.chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self.chain(c, -s, -c)

    def sinh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self.chain(s, c, s)

    def cosh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self.chain(c, s, c)

    def tanh(self) -> "Jet2":
        t = math.tanh(self.value)
        sech2 = 1.0 - t * t
        return self.chain(t, sech2, -2.0 * t * sech2)


FUNCTIONS: dict = {
    "sqrt": Jet2.sqrt,
    "exp": Jet2.exp,
    "log": Jet2.log,
    "sin": Jet2.sin,
    "cos": Jet2.cos,
    "sinh": Jet2.sinh,
    "cosh": Jet2.cosh,
    "tanh": Jet2.tanh,
}


def seed_jets(point: Sequence[float]) -> Tuple[Jet2, ...]:
    """Coordinate functions at a point, the identity jets of the chart."""
    dim = len(point)
    return tuple(Jet2.variable(float(x), i, dim) for i, x in enumerate(point))


def values(jets: np.ndarray) -> np.ndarray:
    """Values of an object array of jets."""
    out = np.empty(jets.shape)
    for index, jet in np.ndenumerate(jets):
        out[index] = jet.value
    return out


def gradients(jets: np.ndarray) -> np.ndarray:
    """First derivatives with the derivative index last."""
    flat = list(jets.flat)
    dim = flat[0].dim if flat else 0
    out = np.empty(jets.shape + (dim,))
    for index, jet in np.ndenumerate(jets):
        out[index] = jet.gradient
    return out


def hessians(jets: np.ndarray) -> np.ndarray:
    """Second derivatives with the two derivative indices last."""
    flat = list(jets.flat)
    dim = flat[0].dim if flat else 0
    out = np.empty(jets.shape + (dim, dim))
    for index, jet in np.ndenumerate(jets):
        out[index] = jet.hessian
    return out


def from_arrays(value: np.ndarray, grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    """Inverse of values/gradients/hessians."""
    out = np.empty(value.shape, dtype=object)
    for index in np.ndindex(*value.shape):
        out[index] = Jet2(value[index], grad[index].copy(), hess[index].copy())
    return out


def jet_inverse(matrix: np.ndarray) -> np.ndarray:
    """
    Inverse of a square matrix of jets.

    Uses ∂V = −V ∂M V and ∂∂V = V(∂M V ∂M + ∂M V ∂M − ∂∂M)V with V = M⁻¹.
    """
    m0 = values(matrix)
    dm = gradients(matrix)
    ddm = hessians(matrix)
    inv = np.linalg.inv(m0)
    dinv = -np.einsum("ia,abm,bj->ijm", inv, dm, inv)
    first = np.einsum("abm,bc,cdn->admn", dm, inv, dm)
    inner = first + np.swapaxes(first, 2, 3) - ddm
    ddinv = np.einsum("ia,admn,dj->ijmn", inv, inner, inv)
    return from_arrays(inv, dinv, ddinv)


def jet_determinant(matrix: np.ndarray):
    """Determinant by cofactor expansion, exact on jets for small matrices."""
    n = matrix.shape[0]
    if n == 1:
        return matrix[0, 0]
    if n == 2:
        return matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]
    total = None
    for col in range(n):
        minor = np.delete(np.delete(matrix, 0, axis=0), col, axis=1)
        term = matrix[0, col] * jet_determinant(minor)
        if col % 2:
            term = -term
        total = term if total is None else total + term
    return total
