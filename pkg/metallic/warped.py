"""
Warped products ℝ ×_f N with the metric dt² + f(t)² g_N.

The product chart puts the base coordinate first, so index 0 is t and the
fiber coordinates follow in their own order. Fiber fields are lifted with a
zero t-component.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .domain import (
    FiberNotLocallyMetallic,
    InvalidParameters,
    MissingFiberStructure,
    NonPositiveWarping,
    ResidualAccumulator,
    VerificationReport,
    max_abs,
)
from .exprlang import (
    Const,
    Expr,
    differentiate,
    div,
    evaluate,
    mul,
    neg,
    parse,
    power,
    shift_variables,
    variable_indices,
)
from .jets import gradients, seed_jets, values
from .structures import (
    MetallicStructure,
    QuadraticPhiStructure,
    verify_locally_metallic,
)
from .tensor import (
    ChartedManifold,
    OneForm,
    TensorField11,
    VectorField,
    covariant_derivative_11_tensor,
    nijenhuis_tensor,
    vector_derivative_tensor,
)

logger = logging.getLogger(__name__)

WARPING_PROBES = 65


@dataclass(frozen=True, eq=False)
class WarpedProduct:
    """Fiber chart, optional fiber structure and a warping function of t."""

    fiber: ChartedManifold
    warping: Expr
    base_interval: Tuple[float, float] = (-1.0, 1.0)
    structure: Optional[MetallicStructure] = None
    base_coord: str = "t"

    def __post_init__(self):
        if self.base_coord in self.fiber.coords:
            raise InvalidParameters(
                f"Base coordinate '{self.base_coord}' clashes with the fiber chart"
            )
        if variable_indices(self.warping) - {0}:
            raise InvalidParameters("The warping function may only depend on t")
        lo, hi = self.base_interval
        if lo > hi:
            raise InvalidParameters(f"Empty base interval [{lo}, {hi}]")
        if self.structure is not None and self.structure.dim != self.fiber.dim:
            raise InvalidParameters("Fiber structure dimension differs from the fiber")

    @classmethod
    def from_strings(
        cls,
        fiber: ChartedManifold,
        warping: str,
        base_interval: Tuple[float, float] = (-1.0, 1.0),
        structure: Optional[MetallicStructure] = None,
        base_coord: str = "t",
    ) -> "WarpedProduct":
        return cls(
            fiber=fiber,
            warping=parse(warping, [base_coord]),
            base_interval=base_interval,
            structure=structure,
            base_coord=base_coord,
        )

    @property
    def coords(self) -> Tuple[str, ...]:
        return (self.base_coord,) + self.fiber.coords

    @property
    def dim(self) -> int:
        return 1 + self.fiber.dim

    @property
    def sample_box(self) -> Tuple[Tuple[float, float], ...]:
        return (tuple(self.base_interval),) + self.fiber.sample_box

    def lift(self, node: Expr) -> Expr:
        """Re-index a fiber expression into the product chart."""
        return shift_variables(node, self.coords, 1)

    @property
    def log_derivative(self) -> Expr:
        """f′/f as an expression in the product chart."""
        return div(differentiate(self.warping, 0), self.warping)

    @property
    def kenmotsu_beta(self) -> Expr:
        """β = −f′/f."""
        return neg(self.log_derivative)

    def warping_at(self, t: float) -> Tuple[float, float]:
        """f(t) and f′(t)."""
        jet = evaluate(self.warping, seed_jets([t]))
        return jet.value, float(jet.gradient[0])


def check_warping(wp: WarpedProduct) -> None:
    """f > 0 on a uniform grid over the closed base interval."""
    lo, hi = wp.base_interval
    for t in np.linspace(lo, hi, WARPING_PROBES):
        value, _ = wp.warping_at(float(t))
        if not value > 0.0:
            raise NonPositiveWarping(f"Warping function is {value:g} at t = {t:g}")


def warped_metric(wp: WarpedProduct) -> ChartedManifold:
    """Block metric diag(1, f(t)² g_N) on the chart (t, fiber coords)."""
    check_warping(wp)
    n = wp.dim
    scale = power(wp.warping, Const(2.0))
    matrix = [[Const(0.0) for _ in range(n)] for _ in range(n)]
    matrix[0][0] = Const(1.0)
    for i in range(1, n):
        for j in range(i, n):
            entry = mul(scale, wp.lift(wp.fiber.metric_entry(i - 1, j - 1)))
            matrix[i][j] = entry
            matrix[j][i] = entry
    return ChartedManifold.from_matrix(wp.coords, wp.sample_box, matrix)


@dataclass(frozen=True, eq=False)
class InducedQuadraticStructure:
    """The quadratic φ-structure on a warped product with ξ = ∂_t and η = dt."""

    manifold: ChartedManifold
    structure: QuadraticPhiStructure


def induce_phi(wp: WarpedProduct) -> InducedQuadraticStructure:
    """φ(η(X)ξ + X) = JX: extend the fiber J by zero on ∂_t."""
    if wp.structure is None:
        raise MissingFiberStructure("Warped product has no fiber metallic structure")
    j = wp.structure.J
    n = wp.dim
    rows = [[Const(0.0) for _ in range(n)] for _ in range(n)]
    for i in range(1, n):
        for k in range(1, n):
            rows[i][k] = wp.lift(j.components[i - 1][k - 1])
    unit = np.eye(n)[0]
    structure = QuadraticPhiStructure(
        a=float(wp.structure.p),
        b=float(wp.structure.q),
        phi=TensorField11(tuple(tuple(row) for row in rows)),
        eta=OneForm.constant(unit),
        xi=VectorField.constant(unit),
    )
    return InducedQuadraticStructure(manifold=warped_metric(wp), structure=structure)


def verify_az_formulas(
    wp: WarpedProduct, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    Christoffel-derived connection against the closed forms
    ∇_∂t ∂t = 0, ∇_∂t X = (f′/f)X and ∇_X Y = ᴺ∇_X Y − (⟨X,Y⟩/f)f′ ∂t.
    """
    m = warped_metric(wp)
    n = wp.fiber.dim
    base = ResidualAccumulator("base_geodesic", tol)
    mixed = ResidualAccumulator("mixed", tol)
    fiber = ResidualAccumulator("fiber", tol)
    for point in samples:
        gamma = m.frame(point).christoffel
        f, df = wp.warping_at(point[0])
        fiber_frame = wp.fiber.frame(point[1:])
        base.add(point, max_abs(gamma[:, 0, 0]))
        expected_mixed = np.zeros((n + 1, n))
        expected_mixed[1:, :] = (df / f) * np.eye(n)
        mixed.add(
            point,
            max(
                max_abs(gamma[:, 0, 1:] - expected_mixed),
                max_abs(gamma[:, 1:, 0] - expected_mixed),
            ),
        )
        expected_fiber = np.zeros((n + 1, n, n))
        expected_fiber[1:] = fiber_frame.christoffel
        expected_fiber[0] = -f * df * fiber_frame.metric
        fiber.add(point, max_abs(gamma[:, 1:, 1:] - expected_fiber))
    return VerificationReport(checks=[base.result(), mixed.result(), fiber.result()])


def _kenmotsu_expected(
    beta: float, g: np.ndarray, phi: np.ndarray, eta: np.ndarray, xi: np.ndarray
) -> np.ndarray:
    """E[a, b, m] = β(g(∂_m, φ∂_b)ξ^a + η_b φ^a_m)."""
    return beta * (
        np.einsum("mb,a->abm", g @ phi, xi) + np.einsum("b,am->abm", eta, phi)
    )


def verify_kenmotsu(
    m: ChartedManifold,
    s: QuadraticPhiStructure,
    beta: Expr,
    samples: np.ndarray,
    tol: float,
) -> VerificationReport:
    """
    (∇_X φ)Y = β(g(X,φY)ξ + η(Y)φX), ∇_X ξ = −β(X − η(X)ξ), dη = 0 and
    g(∇_X ξ, ξ) = 0. β = 0 is the cosymplectic case.
    """
    n = s.dim
    identity = np.eye(n)
    phi_derivative = ResidualAccumulator("phi_derivative", tol)
    xi_derivative = ResidualAccumulator("xi_derivative", tol)
    closed = ResidualAccumulator("closed_eta", tol)
    orthogonal = ResidualAccumulator("xi_orthogonal", tol)
    for point in samples:
        frame = m.frame(point)
        env = seed_jets(point)
        b = evaluate(beta, env).value
        phi_jets = s.phi.jets_in(env)
        eta_jets = s.eta.jets_in(env)
        xi_jets = s.xi.jets_in(env)
        phi, eta, xi = values(phi_jets), values(eta_jets), values(xi_jets)
        dphi = covariant_derivative_11_tensor(frame, phi, gradients(phi_jets))
        phi_derivative.add(
            point, max_abs(dphi - _kenmotsu_expected(b, frame.metric, phi, eta, xi))
        )
        dxi = vector_derivative_tensor(frame, xi, gradients(xi_jets))
        xi_derivative.add(point, max_abs(dxi + b * (identity - np.outer(xi, eta))))
        deta = gradients(eta_jets)
        closed.add(point, max_abs(deta - deta.T))
        orthogonal.add(point, max_abs(xi @ frame.metric @ dxi))
    return VerificationReport(
        checks=[
            phi_derivative.result(),
            xi_derivative.result(),
            closed.result(),
            orthogonal.result(),
        ]
    )


def _lift_fiber_tensor(fiber_tensor: np.ndarray) -> np.ndarray:
    """Zero-pad every axis of a fiber component array by the t slot."""
    return np.pad(fiber_tensor, [(1, 0)] * fiber_tensor.ndim)


def verify_lift_identity(
    wp: WarpedProduct, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    (∇̃_X φ)Y = (ᴺ∇_X J)Y − (f′/f)(⟨X,φY⟩ξ + η(Y)φX) for any fiber J.
    """
    if wp.structure is None:
        raise MissingFiberStructure("Warped product has no fiber metallic structure")
    fiber_j = wp.structure.J
    induced = induce_phi(wp)
    m, s = induced.manifold, induced.structure
    identity_check = ResidualAccumulator("lift_identity", tol)
    for point in samples:
        frame = m.frame(point)
        phi_jets = s.phi.jets(point)
        phi = values(phi_jets)
        dphi = covariant_derivative_11_tensor(frame, phi, gradients(phi_jets))
        fiber_frame = wp.fiber.frame(point[1:])
        j_jets = fiber_j.jets(point[1:])
        fiber_dj = covariant_derivative_11_tensor(
            fiber_frame, values(j_jets), gradients(j_jets)
        )
        f, df = wp.warping_at(point[0])
        eta, xi = s.eta.value(point), s.xi.value(point)
        expected = _lift_fiber_tensor(fiber_dj) + _kenmotsu_expected(
            -df / f, frame.metric, phi, eta, xi
        )
        identity_check.add(point, max_abs(dphi - expected))
    return VerificationReport(checks=[identity_check.result()])


def estimate_beta(
    m: ChartedManifold, s: QuadraticPhiStructure, point: Sequence[float]
) -> float:
    """
    β from ∇_X ξ = −β(X − η(X)ξ): minus the mean of (∇_∂i ξ)^i over the
    fiber directions, which are the coordinates 1..n of a warped chart.
    """
    frame = m.frame(point)
    xi_jets = s.xi.jets(point)
    dxi = vector_derivative_tensor(frame, values(xi_jets), gradients(xi_jets))
    fiber = np.diag(dxi)[1:]
    return -float(np.mean(fiber)) if fiber.size else 0.0


def theorem_qc_check(
    wp: WarpedProduct,
    samples: np.ndarray,
    tol: float,
    expected_beta: Optional[Expr] = None,
) -> VerificationReport:
    """
    A warped product over a parallel metallic fiber is Kenmotsu with
    β = −f′/f. Raises FiberNotLocallyMetallic when the fiber is not parallel.
    """
    if wp.structure is None:
        raise MissingFiberStructure("Warped product has no fiber metallic structure")
    fiber_report = verify_locally_metallic(
        wp.fiber, wp.structure, samples[:, 1:], tol
    )
    fiber_residual = fiber_report.check("parallel").max_residual
    if fiber_residual > tol:
        raise FiberNotLocallyMetallic(fiber_residual)

    induced = induce_phi(wp)
    m, s = induced.manifold, induced.structure
    beta = wp.kenmotsu_beta
    report = verify_kenmotsu(m, s, beta, samples, tol)
    report = report.merged(verify_lift_identity(wp, samples, tol))

    estimate = ResidualAccumulator("beta_estimate", tol)
    expected = ResidualAccumulator("beta_expected", tol)
    estimates = []
    for point in samples:
        env = seed_jets(point)
        value = estimate_beta(m, s, point)
        estimates.append(value)
        estimate.add(point, abs(value - evaluate(beta, env).value))
        if expected_beta is not None:
            expected.add(point, abs(value - evaluate(expected_beta, env).value))
    if estimates:
        estimate.note(
            f"β = -f'/f ranges over [{min(estimates):.12g}, {max(estimates):.12g}]"
        )
    checks = [estimate.result()]
    if expected_beta is not None:
        expected.note(f"expected β = {expected_beta}")
        checks.append(expected.result())
    logger.info(f"🔎 β = {beta} checked on {len(samples)} points")
    return report.merged(VerificationReport(checks=checks))


def nijenhuis_phi_check(
    m: ChartedManifold, s: QuadraticPhiStructure, samples: np.ndarray, tol: float
) -> VerificationReport:
    """Max |N_φ(∂_i, ∂_j)| over samples."""
    torsion = ResidualAccumulator("nijenhuis", tol)
    for point in samples:
        jets = s.phi.jets(point)
        torsion.add(point, max_abs(nijenhuis_tensor(values(jets), gradients(jets))))
    return VerificationReport(checks=[torsion.result()])
