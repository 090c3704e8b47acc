"""
Charts, tensor fields and the Levi-Civita machinery.

All quantities are evaluated pointwise. Component arrays keep derivative
indices last: ``dg[i, j, m] = ∂_m g_ij``, ``christoffel[k, i, j] = Γ^k_ij``,
``christoffel_gradient[k, i, j, m] = ∂_m Γ^k_ij``. The curvature sign
convention is R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .domain import (
    InvalidParameters,
    ResidualAccumulator,
    SingularMetric,
    VerificationReport,
    max_abs,
)
from .exprlang import Const, Expr, evaluate, parse
from .jets import Jet2, gradients, hessians, seed_jets, values

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, float], ...]

CONDITION_LIMIT = 1e12


def _evaluate_grid(
    entries: Sequence[Sequence[Expr]], env: Sequence[Jet2]
) -> np.ndarray:
    rows, cols = len(entries), len(entries[0]) if entries else 0
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = evaluate(entries[i][j], env)
    return out


@dataclass(frozen=True, eq=False)
class ChartedManifold:
    """
    A single chart with a Riemannian metric given by expressions.

    Only the upper triangle of the metric is kept: ``metric[i][j]`` for
    ``j < i`` returns the entry stored at ``[j][i]``.
    """

    coords: Tuple[str, ...]
    sample_box: Box
    upper: Tuple[Tuple[Expr, ...], ...]

    def __post_init__(self):
        if not self.coords:
            raise InvalidParameters("A chart needs at least one coordinate")
        if len(self.sample_box) != self.dim:
            raise InvalidParameters(
                f"Sample box has {len(self.sample_box)} intervals for {self.dim} coords"
            )
        for i, row in enumerate(self.upper):
            if len(row) != self.dim - i:
                raise InvalidParameters("Metric upper triangle has the wrong shape")
        for lo, hi in self.sample_box:
            if lo > hi:
                raise InvalidParameters(f"Empty sample interval [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def from_matrix(
        cls, coords: Sequence[str], sample_box: Sequence[Sequence[float]], matrix
    ) -> "ChartedManifold":
        """Build from a full matrix of expressions; it must be symmetric."""
        n = len(coords)
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise InvalidParameters(f"Metric must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if matrix[i][j] != matrix[j][i]:
                    raise InvalidParameters(
                        f"Metric entries [{i}][{j}] and [{j}][{i}] differ"
                    )
        upper = tuple(tuple(matrix[i][j] for j in range(i, n)) for i in range(n))
        box = tuple((float(lo), float(hi)) for lo, hi in sample_box)
        return cls(coords=tuple(coords), sample_box=box, upper=upper)

    @classmethod
    def from_strings(
        cls,
        coords: Sequence[str],
        sample_box: Sequence[Sequence[float]],
        rows: Sequence[Sequence[str]],
    ) -> "ChartedManifold":
        matrix = [[parse(entry, coords) for entry in row] for row in rows]
        return cls.from_matrix(coords, sample_box, matrix)

    @classmethod
    def euclidean(
        cls, coords: Sequence[str], sample_box: Sequence[Sequence[float]]
    ) -> "ChartedManifold":
        n = len(coords)
        matrix = [[Const(1.0 if i == j else 0.0) for j in range(n)] for i in range(n)]
        return cls.from_matrix(coords, sample_box, matrix)

    def metric_entry(self, i: int, j: int) -> Expr:
        if j < i:
            i, j = j, i
        return self.upper[i][j - i]

    @property
    def metric(self) -> Tuple[Tuple[Expr, ...], ...]:
        return tuple(
            tuple(self.metric_entry(i, j) for j in range(self.dim))
            for i in range(self.dim)
        )

    def metric_jets(self, point: Sequence[float]) -> np.ndarray:
        return self.metric_jets_in(seed_jets(point))

    def metric_jets_in(self, env: Sequence[Jet2]) -> np.ndarray:
        """Metric entries composed with arbitrary coordinate jets."""
        n = self.dim
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(i, n):
                out[i, j] = evaluate(self.upper[i][j - i], env)
                out[j, i] = out[i, j]
        return out

    def frame(self, point: Sequence[float]) -> "PointFrame":
        return PointFrame.from_metric_jets(point, self.metric_jets(point))


@dataclass(frozen=True, eq=False)
class TensorField11:
    """A (1,1) tensor field; ``components[i][j]`` is K^i_j."""

    components: Tuple[Tuple[Expr, ...], ...]

    def __post_init__(self):
        n = len(self.components)
        if any(len(row) != n for row in self.components):
            raise InvalidParameters("A (1,1) tensor field must be square")

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def from_strings(
        cls, rows: Sequence[Sequence[str]], coords: Sequence[str]
    ) -> "TensorField11":
        return cls(tuple(tuple(parse(e, coords) for e in row) for row in rows))

    @classmethod
    def constant(cls, matrix) -> "TensorField11":
        array = np.asarray(matrix, dtype=float)
        return cls(tuple(tuple(Const(float(v)) for v in row) for row in array))

    @classmethod
    def identity(cls, dim: int) -> "TensorField11":
        return cls.constant(np.eye(dim))

    def jets(self, point: Sequence[float]) -> np.ndarray:
        return _evaluate_grid(self.components, seed_jets(point))

    def jets_in(self, env: Sequence[Jet2]) -> np.ndarray:
        return _evaluate_grid(self.components, env)

    def value(self, point: Sequence[float]) -> np.ndarray:
        return values(self.jets(point))


@dataclass(frozen=True, eq=False)
class VectorField:
    """Components X^i of a vector field."""

    components: Tuple[Expr, ...]

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def from_strings(
        cls, entries: Sequence[str], coords: Sequence[str]
    ) -> "VectorField":
        return cls(tuple(parse(e, coords) for e in entries))

    @classmethod
    def constant(cls, vector) -> "VectorField":
        return cls(tuple(Const(float(v)) for v in vector))

    @classmethod
    def coordinate(cls, index: int, dim: int) -> "VectorField":
        return cls.constant(np.eye(dim)[index])

    def jets(self, point: Sequence[float]) -> np.ndarray:
        return self.jets_in(seed_jets(point))

    def jets_in(self, env: Sequence[Jet2]) -> np.ndarray:
        out = np.empty(self.dim, dtype=object)
        for i, component in enumerate(self.components):
            out[i] = evaluate(component, env)
        return out

    def value(self, point: Sequence[float]) -> np.ndarray:
        return values(self.jets(point))


class OneForm(VectorField):
    """Components η_i of a one-form; same storage as a vector field."""


@dataclass(frozen=True, eq=False)
class PointFrame:
    """Levi-Civita data cached at one point of a chart."""

    point: np.ndarray
    metric: np.ndarray
    metric_inverse: np.ndarray
    metric_gradient: np.ndarray
    metric_hessian: np.ndarray
    christoffel: np.ndarray
    christoffel_gradient: np.ndarray
    christoffel_asymmetry: float = 0.0

    @property
    def dim(self) -> int:
        return int(self.metric.shape[0])

    @classmethod
    def from_metric_jets(cls, point: Sequence[float], jets: np.ndarray) -> "PointFrame":
        g = values(jets)
        dg = gradients(jets)
        ddg = hessians(jets)
        if not np.all(np.isfinite(g)):
            raise SingularMetric(f"Metric is not finite at {list(point)}")
        try:
            condition = np.linalg.cond(g)
        except np.linalg.LinAlgError as e:
            raise SingularMetric(f"Metric not invertible at {list(point)}: {e}") from e
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise SingularMetric(
                f"Metric not invertible at {list(point)} (condition {condition:.3e})"
            )
        ginv = np.linalg.inv(g)

        first_kind = (
            np.einsum("jli->lij", dg)
            + np.einsum("ilj->lij", dg)
            - np.einsum("ijl->lij", dg)
        )
        gamma = 0.5 * np.einsum("kl,lij->kij", ginv, first_kind)

        first_kind_gradient = (
            np.einsum("jlim->lijm", ddg)
            + np.einsum("iljm->lijm", ddg)
            - np.einsum("ijlm->lijm", ddg)
        )
        ginv_gradient = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
        gamma_gradient = 0.5 * (
            np.einsum("klm,lij->kijm", ginv_gradient, first_kind)
            + np.einsum("kl,lijm->kijm", ginv, first_kind_gradient)
        )
        asymmetry = max_abs(gamma - np.swapaxes(gamma, 1, 2))
        gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))
        gamma_gradient = 0.5 * (gamma_gradient + np.swapaxes(gamma_gradient, 1, 2))
        return cls(
            point=np.asarray(point, dtype=float),
            metric=g,
            metric_inverse=ginv,
            metric_gradient=dg,
            metric_hessian=ddg,
            christoffel=gamma,
            christoffel_gradient=gamma_gradient,
            christoffel_asymmetry=asymmetry,
        )

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.metric @ y)


def christoffel(m: ChartedManifold, p: Sequence[float]) -> np.ndarray:
    """Γ^k_ij at ``p`` as an array indexed [k, i, j]."""
    return m.frame(p).christoffel


def vector_derivative_tensor(
    frame: PointFrame, y_value: np.ndarray, y_gradient: np.ndarray
) -> np.ndarray:
    """(∇Y)[k, m] = ∂_m Y^k + Γ^k_mj Y^j."""
    return y_gradient + np.einsum("kmj,j->km", frame.christoffel, y_value)


def covariant_derivative_vector(
    frame: PointFrame, y_value: np.ndarray, y_gradient: np.ndarray, x: np.ndarray
) -> np.ndarray:
    """∇_X Y at the frame point."""
    return vector_derivative_tensor(frame, y_value, y_gradient) @ x


def covariant_derivative_11_tensor(
    frame: PointFrame, k_value: np.ndarray, k_gradient: np.ndarray
) -> np.ndarray:
    """(∇K)[a, b, m] = (∇_m K)^a_b."""
    gamma = frame.christoffel
    return (
        k_gradient
        + np.einsum("amc,cb->abm", gamma, k_value)
        - np.einsum("ac,cmb->abm", k_value, gamma)
    )


def covariant_derivative_11(
    m: ChartedManifold,
    K: TensorField11,
    X: np.ndarray,
    Y: np.ndarray,
    p: Sequence[float],
) -> np.ndarray:
    """(∇_X K)Y = ∇_X(KY) − K(∇_X Y) for vectors X, Y at ``p``."""
    frame = m.frame(p)
    jets = K.jets(p)
    dk = covariant_derivative_11_tensor(frame, values(jets), gradients(jets))
    return np.einsum("abm,b,m->a", dk, np.asarray(Y, float), np.asarray(X, float))


def covariant_derivative_02_tensor(
    frame: PointFrame, h_value: np.ndarray, h_gradient: np.ndarray
) -> np.ndarray:
    """(∇h)[i, j, m] = (∇_m h)_ij for a (0,2) tensor."""
    gamma = frame.christoffel
    return (
        h_gradient
        - np.einsum("cmi,cj->ijm", gamma, h_value)
        - np.einsum("cmj,ic->ijm", gamma, h_value)
    )


def covariant_derivative_metric(frame: PointFrame) -> np.ndarray:
    return covariant_derivative_02_tensor(frame, frame.metric, frame.metric_gradient)


def covariant_derivative_oneform(
    frame: PointFrame, eta_value: np.ndarray, eta_gradient: np.ndarray
) -> np.ndarray:
    """(∇η)[j, m] = (∇_m η)_j."""
    return eta_gradient - np.einsum("cmj,c->jm", frame.christoffel, eta_value)


def lie_bracket_jets(x_jets: np.ndarray, y_jets: np.ndarray) -> np.ndarray:
    """[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k from component jets."""
    return gradients(y_jets) @ values(x_jets) - gradients(x_jets) @ values(y_jets)


def lie_bracket(X: VectorField, Y: VectorField, p: Sequence[float]) -> np.ndarray:
    return lie_bracket_jets(X.jets(p), Y.jets(p))


def nijenhuis_jets(
    k_jets: np.ndarray, x_jets: np.ndarray, y_jets: np.ndarray
) -> np.ndarray:
    """N_K(X,Y) = K²[X,Y] + [KX,KY] − K[KX,Y] − K[X,KY]."""
    k = values(k_jets)
    kx = np.dot(k_jets, x_jets)
    ky = np.dot(k_jets, y_jets)
    return (
        k @ k @ lie_bracket_jets(x_jets, y_jets)
        + lie_bracket_jets(kx, ky)
        - k @ lie_bracket_jets(kx, y_jets)
        - k @ lie_bracket_jets(x_jets, ky)
    )


def nijenhuis(
    K: TensorField11, X: VectorField, Y: VectorField, p: Sequence[float]
) -> np.ndarray:
    return nijenhuis_jets(K.jets(p), X.jets(p), Y.jets(p))


def nijenhuis_tensor(k_value: np.ndarray, k_gradient: np.ndarray) -> np.ndarray:
    """N[a, i, j] = N_K(∂_i, ∂_j)^a."""
    along = np.einsum("bi,ajb->aij", k_value, k_gradient)
    inner = np.einsum("ab,bji->aij", k_value, k_gradient) - np.einsum(
        "ab,bij->aij", k_value, k_gradient
    )
    return along - np.swapaxes(along, 1, 2) - inner


def riemann_tensor(frame: PointFrame) -> np.ndarray:
    """R[a, b, c, d] with R(∂_c, ∂_d)∂_b = R[a, b, c, d] ∂_a."""
    gamma = frame.christoffel
    dgamma = frame.christoffel_gradient
    return (
        np.einsum("adbc->abcd", dgamma)
        - np.einsum("acbd->abcd", dgamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )


def curvature_apply(
    curvature: np.ndarray, x: np.ndarray, y: np.ndarray, z: np.ndarray
) -> np.ndarray:
    return np.einsum("abcd,b,c,d->a", curvature, z, x, y)


def riemann(
    m: ChartedManifold,
    X: np.ndarray,
    Y: np.ndarray,
    Z: np.ndarray,
    p: Sequence[float],
) -> np.ndarray:
    """R(X,Y)Z at ``p``."""
    curvature = riemann_tensor(m.frame(p))
    return curvature_apply(
        curvature, np.asarray(X, float), np.asarray(Y, float), np.asarray(Z, float)
    )


def sectional_curvature(frame: PointFrame, x: np.ndarray, y: np.ndarray) -> float:
    curvature = riemann_tensor(frame)
    numerator = frame.inner(curvature_apply(curvature, x, y, y), x)
    area = frame.inner(x, x) * frame.inner(y, y) - frame.inner(x, y) ** 2
    if area <= 0.0:
        raise InvalidParameters("Sectional curvature needs independent vectors")
    return numerator / area


def verify_levi_civita(
    m: ChartedManifold,
    samples: np.ndarray,
    tol: float,
    floor: float = 1e-10,
) -> VerificationReport:
    """Metric positivity, Γ symmetry, ∇g = 0, curvature antisymmetry and Bianchi."""
    positive = ResidualAccumulator("metric_positive_definite", 0.0)
    symmetry = ResidualAccumulator("christoffel_symmetry", tol)
    parallel = ResidualAccumulator("metric_parallel", tol)
    antisym = ResidualAccumulator("riemann_antisymmetry", tol)
    bianchi = ResidualAccumulator("first_bianchi", tol)
    for point in samples:
        frame = m.frame(point)
        smallest = float(np.linalg.eigvalsh(frame.metric)[0])
        positive.add(point, max(0.0, floor - smallest))
        symmetry.add(point, frame.christoffel_asymmetry)
        parallel.add(point, max_abs(covariant_derivative_metric(frame)))
        curvature = riemann_tensor(frame)
        antisym.add(point, max_abs(curvature + np.swapaxes(curvature, 2, 3)))
        cyclic = (
            curvature
            + np.einsum("abcd->acdb", curvature)
            + np.einsum("abcd->adbc", curvature)
        )
        bianchi.add(point, max_abs(cyclic))
    logger.debug(f"Levi-Civita checks done on {len(samples)} points")
    return VerificationReport(
        checks=[
            positive.result(),
            symmetry.result(),
            parallel.result(),
            antisym.result(),
            bianchi.result(),
        ]
    )
