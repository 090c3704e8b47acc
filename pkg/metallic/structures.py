"""
Polynomial structures: metallic structures, almost product structures and
almost quadratic φ-structures, their conversions, spectral projectors,
the associated metric construction and the verifier suites.

Verifiers never raise on a failing identity; they return a
VerificationReport whose entries carry the residuals.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .domain import (
    CheckResult,
    ComplexSpectrum,
    InvalidParameters,
    ResidualAccumulator,
    VerificationReport,
    max_abs,
)
from .exprlang import add, const, mul
from .jets import gradients, values
from .tensor import (
    ChartedManifold,
    OneForm,
    TensorField11,
    VectorField,
    covariant_derivative_11_tensor,
    nijenhuis_tensor,
)

logger = logging.getLogger(__name__)

SPECTRUM_FLOOR = 1e-8


def metallic_number(p: int, q: int) -> float:
    """Positive root of x² − px − q."""
    if p < 1 or q < 1:
        raise InvalidParameters(f"Metallic numbers need p, q >= 1, got p={p}, q={q}")
    return (p + math.sqrt(p * p + 4 * q)) / 2.0


def conjugate_metallic_number(p: int, q: int) -> float:
    """Negative root of x² − px − q."""
    return p - metallic_number(p, q)


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise InvalidParameters(f"Sign must be +1 or -1, got {sign}")
    return sign


def _affine_field(field: TensorField11, scale: float, shift: float) -> TensorField11:
    """scale·K + shift·I, folded entry by entry."""
    n = field.dim
    return TensorField11(
        tuple(
            tuple(
                add(
                    mul(const(scale), field.components[i][j]),
                    const(shift if i == j else 0.0),
                )
                for j in range(n)
            )
            for i in range(n)
        )
    )


@dataclass(frozen=True, eq=False)
class MetallicStructure:
    """A (1,1) field J with J² = pJ + qI."""

    p: int
    q: int
    J: TensorField11

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise InvalidParameters(
                f"Metallic structures need p, q >= 1, got p={self.p}, q={self.q}"
            )

    @property
    def sigma(self) -> float:
        return metallic_number(self.p, self.q)

    @property
    def sigma_bar(self) -> float:
        return conjugate_metallic_number(self.p, self.q)

    @property
    def root_gap(self) -> float:
        """2σ − p = √(p² + 4q)."""
        return math.sqrt(self.p * self.p + 4 * self.q)

    @property
    def dim(self) -> int:
        return self.J.dim


@dataclass(frozen=True, eq=False)
class AlmostProductStructure:
    """A (1,1) field F with F² = I."""

    F: TensorField11

    @property
    def dim(self) -> int:
        return self.F.dim


def product_from_metallic(
    s: MetallicStructure, sign: int = 1
) -> AlmostProductStructure:
    """F± = ±(2/(2σ−p))J ∓ (p/(2σ−p))I."""
    sign = _check_sign(sign)
    gap = s.root_gap
    return AlmostProductStructure(
        _affine_field(s.J, sign * 2.0 / gap, -sign * s.p / gap)
    )


def metallic_from_product(
    F: AlmostProductStructure, p: int, q: int, sign: int = 1
) -> MetallicStructure:
    """J± = ±((2σ−p)/2)F + (p/2)I."""
    sign = _check_sign(sign)
    gap = 2.0 * metallic_number(p, q) - p
    return MetallicStructure(
        p=p, q=q, J=_affine_field(F.F, sign * gap / 2.0, p / 2.0)
    )


def _metric_values(m: ChartedManifold, point) -> np.ndarray:
    return values(m.metric_jets(point))


def sigma_formula_note(p: int, q: int) -> Optional[str]:
    """Note emitted when the pq variant of the metallic number disagrees."""
    if p == 1:
        return None
    variant = (p + math.sqrt(p * p + 4 * p * q)) / 2.0
    return (
        f"metallic number taken as (p+sqrt(p^2+4q))/2 = "
        f"{metallic_number(p, q):.12g}; the variant (p+sqrt(p^2+4pq))/2 = "
        f"{variant:.12g} does not solve x^2 = px + q"
    )


def verify_metallic(
    m: ChartedManifold, s: MetallicStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    Polynomial identity J² = pJ + qI, compatibility g(JX,Y) = g(X,JY),
    the implied identity g(JX,JY) = p g(JX,Y) + q g(X,Y) and the spectrum.
    """
    identity = np.eye(s.dim)
    polynomial = ResidualAccumulator("polynomial_identity", tol)
    compatible = ResidualAccumulator("compatibility", tol)
    implied = ResidualAccumulator("metric_identity", tol)
    spectrum = ResidualAccumulator("spectrum", max(tol, SPECTRUM_FLOOR))
    roots = np.array([s.sigma, s.sigma_bar])
    for point in samples:
        j = s.J.value(point)
        g = _metric_values(m, point)
        polynomial.add(point, max_abs(j @ j - s.p * j - s.q * identity))
        compatible.add(point, max_abs(j.T @ g - g @ j))
        implied.add(point, max_abs(j.T @ g @ j - s.p * (j.T @ g) - s.q * g))
        eigenvalues = np.linalg.eigvals(j)
        distance = np.min(np.abs(eigenvalues[:, None] - roots[None, :]), axis=1)
        spectrum.add(point, float(np.max(distance)) if distance.size else 0.0)
    notes = []
    note = sigma_formula_note(s.p, s.q)
    if note:
        notes.append(note)
        logger.warning(f"⚠️ {note}")
    return VerificationReport(
        checks=[
            polynomial.result(),
            compatible.result(),
            implied.result(),
            spectrum.result(),
        ],
        notes=notes,
    )


def verify_integrable(
    m: ChartedManifold, s: MetallicStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """Max |N_J(∂_i, ∂_j)| over samples and basis pairs."""
    torsion = ResidualAccumulator("nijenhuis", tol)
    for point in samples:
        jets = s.J.jets(point)
        torsion.add(point, max_abs(nijenhuis_tensor(values(jets), gradients(jets))))
    return VerificationReport(checks=[torsion.result()])


def verify_locally_metallic(
    m: ChartedManifold, s: MetallicStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    Max |(∇_X J)Y| over samples and basis pairs.

    A parallel structure is integrable, so the Nijenhuis entry is enforced
    only when the parallel check passes.
    """
    parallel = ResidualAccumulator("parallel", tol)
    for point in samples:
        frame = m.frame(point)
        jets = s.J.jets(point)
        derivative = covariant_derivative_11_tensor(
            frame, values(jets), gradients(jets)
        )
        parallel.add(point, max_abs(derivative))
    parallel_result = parallel.result()
    torsion = verify_integrable(m, s, samples, tol).check("nijenhuis")
    if not parallel_result.passed:
        torsion = _informational(torsion, "not enforced: structure is not parallel")
    return VerificationReport(checks=[parallel_result, torsion])


def _informational(result: CheckResult, note: str) -> CheckResult:
    return replace(result, notes=result.notes + (note,), enforced=False)


PRODUCT_SIGN_NOTE = (
    "F- is built as -(2/(2σ-p))J + (p/(2σ-p))I; keeping a minus sign on the "
    "identity term for both signs would not square to I"
)


def verify_product_roundtrip(
    m: ChartedManifold, s: MetallicStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """F±² = I, F₋ = −F₊ and both conversion round trips."""
    plus = product_from_metallic(s, 1)
    minus = product_from_metallic(s, -1)
    back = metallic_from_product(plus, s.p, s.q, 1)
    back_minus = metallic_from_product(minus, s.p, s.q, -1)
    again = product_from_metallic(back, 1)
    identity = np.eye(s.dim)
    involution = ResidualAccumulator("involution", tol)
    opposite = ResidualAccumulator("opposite_signs", tol)
    metallic_trip = ResidualAccumulator("metallic_roundtrip", tol)
    product_trip = ResidualAccumulator("product_roundtrip", tol)
    for point in samples:
        f_plus = plus.F.value(point)
        f_minus = minus.F.value(point)
        j = s.J.value(point)
        involution.add(
            point,
            max(
                max_abs(f_plus @ f_plus - identity),
                max_abs(f_minus @ f_minus - identity),
            ),
        )
        opposite.add(point, max_abs(f_plus + f_minus))
        metallic_trip.add(
            point,
            max(
                max_abs(back.J.value(point) - j),
                max_abs(back_minus.J.value(point) - j),
            ),
        )
        product_trip.add(point, max_abs(again.F.value(point) - f_plus))
    return VerificationReport(
        checks=[
            involution.result(),
            opposite.result(),
            metallic_trip.result(),
            product_trip.result(),
        ],
        notes=[PRODUCT_SIGN_NOTE],
    )


@dataclass(frozen=True, eq=False)
class QuadraticPhiStructure:
    """
    An almost quadratic φ-structure (φ, η, ξ) with
    φ² = aφ + b(I − η⊗ξ) and φξ = 0.
    """

    a: float
    b: float
    phi: TensorField11
    eta: OneForm
    xi: VectorField

    def __post_init__(self):
        if self.b == 0:
            raise InvalidParameters("Quadratic φ-structures need b != 0")
        if self.discriminant == 0:
            raise InvalidParameters("Quadratic φ-structures need a² + 4b != 0")
        if not (self.phi.dim == self.eta.dim == self.xi.dim):
            raise InvalidParameters(
                f"Dimension mismatch: φ {self.phi.dim}, η {self.eta.dim}, "
                f"ξ {self.xi.dim}"
            )

    @property
    def dim(self) -> int:
        return self.phi.dim

    @property
    def discriminant(self) -> float:
        return self.a * self.a + 4.0 * self.b

    @property
    def eigenvalues(self) -> Tuple[complex, complex]:
        """λ± = (a ± √(a²+4b))/2, complex when the discriminant is negative."""
        root = complex(self.discriminant) ** 0.5
        return ((self.a + root) / 2.0, (self.a - root) / 2.0)

    @property
    def lambda_plus(self) -> float:
        return _real_eigenvalue(self, 0)

    @property
    def lambda_minus(self) -> float:
        return _real_eigenvalue(self, 1)

    def values_at(self, point) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.phi.value(point), self.eta.value(point), self.xi.value(point)


def _real_eigenvalue(s: QuadraticPhiStructure, which: int) -> float:
    if s.discriminant < 0:
        raise ComplexSpectrum(
            f"a² + 4b = {s.discriminant:g} < 0: the eigenvalues are not real"
        )
    return s.eigenvalues[which].real


def phi_rank(phi: np.ndarray, threshold: float) -> int:
    """Rank from singular values relative to the largest one."""
    singular = np.linalg.svd(phi, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        return 0
    return int(np.sum(singular / singular[0] > threshold))


def verify_quadratic_phi(
    m: ChartedManifold,
    s: QuadraticPhiStructure,
    samples: np.ndarray,
    tol: float,
    metric_checks: bool = True,
    rank_threshold: float = 1e-8,
) -> VerificationReport:
    """
    Structural identities of (φ, η, ξ); with ``metric_checks`` also the
    compatibility g(φX,Y) = g(X,φY) and
    g(φX,φY) = a g(φX,Y) + b(g(X,Y) − η(X)η(Y)).
    """
    n = s.dim
    identity = np.eye(n)
    quadratic = ResidualAccumulator("quadratic_identity", tol)
    kills_xi = ResidualAccumulator("phi_xi", tol)
    unit = ResidualAccumulator("eta_xi", tol)
    eta_phi = ResidualAccumulator("eta_phi", tol)
    rank = ResidualAccumulator("rank", tol)
    spectrum = ResidualAccumulator("spectrum", max(tol, SPECTRUM_FLOOR))
    compatible = ResidualAccumulator("compatibility", tol)
    metric_identity = ResidualAccumulator("metric_identity", tol)
    roots = np.array([*s.eigenvalues, 0.0])
    for point in samples:
        phi, eta, xi = s.values_at(point)
        projector = np.outer(xi, eta)
        quadratic.add(
            point, max_abs(phi @ phi - s.a * phi - s.b * (identity - projector))
        )
        kills_xi.add(point, max_abs(phi @ xi))
        unit.add(point, abs(float(eta @ xi) - 1.0))
        eta_phi.add(point, max_abs(eta @ phi))
        rank.add(point, abs(phi_rank(phi, rank_threshold) - (n - 1)))
        eigenvalues = np.linalg.eigvals(phi)
        distance = np.min(np.abs(eigenvalues[:, None] - roots[None, :]), axis=1)
        spectrum.add(point, float(np.max(distance)))
        if metric_checks:
            g = _metric_values(m, point)
            compatible.add(point, max_abs(phi.T @ g - g @ phi))
            metric_identity.add(
                point,
                max_abs(
                    phi.T @ g @ phi
                    - s.a * (phi.T @ g)
                    - s.b * (g - np.outer(eta, eta))
                ),
            )
    checks = [
        quadratic.result(),
        kills_xi.result(),
        unit.result(),
        eta_phi.result(),
        rank.result(),
        spectrum.result(),
    ]
    if metric_checks:
        checks += [compatible.result(), metric_identity.result()]
    return VerificationReport(checks=checks)


@dataclass(frozen=True)
class SpectralProjectors:
    """Projectors onto the λ₊, λ₋ and 0 eigendistributions at a point."""

    P_plus: np.ndarray
    P_minus: np.ndarray
    P_zero: np.ndarray

    @property
    def traces(self) -> Tuple[float, float, float]:
        return (
            float(np.trace(self.P_plus)),
            float(np.trace(self.P_minus)),
            float(np.trace(self.P_zero)),
        )


def spectral_projectors(s: QuadraticPhiStructure, point) -> SpectralProjectors:
    """
    Lagrange interpolation of φ at λ₊, λ₋ and 0.

    P₊ = φ(φ − λ₋I)/(λ₊(λ₊ − λ₋)), P₋ likewise and P₀ = η⊗ξ. λ₊λ₋ = −b is
    nonzero, so both denominators are nonzero.
    """
    lam_plus, lam_minus = s.lambda_plus, s.lambda_minus
    phi, eta, xi = s.values_at(point)
    identity = np.eye(s.dim)
    p_plus = phi @ (phi - lam_minus * identity) / (lam_plus * (lam_plus - lam_minus))
    p_minus = phi @ (phi - lam_plus * identity) / (lam_minus * (lam_minus - lam_plus))
    return SpectralProjectors(P_plus=p_plus, P_minus=p_minus, P_zero=np.outer(xi, eta))


def verify_spectral(
    s: QuadraticPhiStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """Idempotence, orthogonality, completeness, eigen relations, constant traces."""
    identity = np.eye(s.dim)
    idempotent = ResidualAccumulator("idempotent", tol)
    orthogonal = ResidualAccumulator("orthogonal", tol)
    complete = ResidualAccumulator("complete", tol)
    eigen = ResidualAccumulator("eigen_relations", tol)
    traces = ResidualAccumulator("trace_constancy", tol)
    reference: Optional[np.ndarray] = None
    for point in samples:
        proj = spectral_projectors(s, point)
        phi = s.phi.value(point)
        parts = (proj.P_plus, proj.P_minus, proj.P_zero)
        idempotent.add(point, max(max_abs(P @ P - P) for P in parts))
        orthogonal.add(
            point,
            max(
                max_abs(parts[i] @ parts[j])
                for i in range(3)
                for j in range(3)
                if i != j
            ),
        )
        complete.add(point, max_abs(sum(parts) - identity))
        eigen.add(
            point,
            max(
                max_abs(phi @ proj.P_plus - s.lambda_plus * proj.P_plus),
                max_abs(phi @ proj.P_minus - s.lambda_minus * proj.P_minus),
                max_abs(phi @ proj.P_zero),
            ),
        )
        current = np.array(proj.traces)
        if reference is None:
            reference = np.rint(current)
        traces.add(point, max_abs(current - reference))
    if reference is not None:
        traces.note(
            "projector traces (+, -, 0) = "
            f"({int(reference[0])}, {int(reference[1])}, {int(reference[2])})"
        )
    return VerificationReport(
        checks=[
            idempotent.result(),
            orthogonal.result(),
            complete.result(),
            eigen.result(),
            traces.result(),
        ]
    )


@dataclass(frozen=True)
class AssociatedMetricConstants:
    """Constants (α, β, γ, δ) of the associated metric construction."""

    c_alpha: float
    c_beta: float
    c_gamma: float
    c_delta: float

    def __post_init__(self):
        if self.c_alpha + self.c_delta == 0:
            raise InvalidParameters("Associated metric constants need α + δ != 0")

    def validate_for(self, s: QuadraticPhiStructure) -> None:
        """β·b = a·γ/2 + α, with a tolerance scaled to the constants."""
        lhs = self.c_beta * s.b
        rhs = s.a * self.c_gamma / 2.0 + self.c_alpha
        scale = max(1.0, abs(lhs), abs(rhs))
        if abs(lhs - rhs) > 1e-12 * scale:
            raise InvalidParameters(
                f"Associated metric constants violate β·b = a·γ/2 + α: "
                f"{lhs:g} != {rhs:g}"
            )


def associated_metric(
    h_tilde: np.ndarray,
    s: QuadraticPhiStructure,
    c: AssociatedMetricConstants,
    point,
) -> np.ndarray:
    """
    h(X,Y) = h̃(φ²X, φ²Y) + η(X)η(Y) and
    g = [α h + β h(φ·,φ·) + (γ/2)(h(φ·,·) + h(·,φ·)) + δ η⊗η] / (α + δ).
    """
    c.validate_for(s)
    phi, eta, _ = s.values_at(point)
    h_tilde = np.asarray(h_tilde, dtype=float)
    phi2 = phi @ phi
    eta_eta = np.outer(eta, eta)
    h = phi2.T @ h_tilde @ phi2 + eta_eta
    g = (
        c.c_alpha * h
        + c.c_beta * (phi.T @ h @ phi)
        + (c.c_gamma / 2.0) * (phi.T @ h + h @ phi)
        + c.c_delta * eta_eta
    ) / (c.c_alpha + c.c_delta)
    return g


def verify_associated_metric(
    m: ChartedManifold,
    s: QuadraticPhiStructure,
    c: AssociatedMetricConstants,
    samples: np.ndarray,
    tol: float,
    floor: float = 1e-10,
) -> VerificationReport:
    """Properties of the associated metric built from the chart metric as h̃."""
    c.validate_for(s)
    symmetric = ResidualAccumulator("symmetric", tol)
    dual = ResidualAccumulator("xi_dual", tol)
    unit = ResidualAccumulator("xi_unit", tol)
    compatible = ResidualAccumulator("compatibility", tol)
    metric_identity = ResidualAccumulator("metric_identity", tol)
    positive = ResidualAccumulator("positive_definite", 0.0)
    for point in samples:
        g = associated_metric(_metric_values(m, point), s, c, point)
        phi, eta, xi = s.values_at(point)
        symmetric.add(point, max_abs(g - g.T))
        dual.add(point, max_abs(g @ xi - eta))
        unit.add(point, abs(float(xi @ g @ xi) - 1.0))
        compatible.add(point, max_abs(phi.T @ g - g @ phi))
        metric_identity.add(
            point,
            max_abs(
                phi.T @ g @ phi - s.a * (phi.T @ g) - s.b * (g - np.outer(eta, eta))
            ),
        )
        smallest = float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])
        positive.add(point, max(0.0, floor - smallest))
        if smallest < floor:
            positive.note(f"smallest eigenvalue {smallest:.3e}")
    return VerificationReport(
        checks=[
            symmetric.result(),
            dual.result(),
            unit.result(),
            compatible.result(),
            metric_identity.result(),
            positive.result(),
        ]
    )


def constant_structure(
    a: float,
    b: float,
    phi: Sequence[Sequence[float]],
    eta: Sequence[float],
    xi: Sequence[float],
) -> QuadraticPhiStructure:
    """Quadratic φ-structure with constant components."""
    return QuadraticPhiStructure(
        a=a,
        b=b,
        phi=TensorField11.constant(phi),
        eta=OneForm.constant(eta),
        xi=VectorField.constant(xi),
    )
