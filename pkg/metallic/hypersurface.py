"""
Hypersurfaces of metallic Riemannian manifolds.

A hypersurface is an embedding u ↦ x(u) of a parameter chart into the
ambient chart. Tangents and their derivatives are obtained symbolically, and
every ambient field is composed with the embedding jets, so induced
quantities carry exact first and second derivatives in the parameters.

The induced structure follows JX = φX + η(X)ν, Jν = qξ + pν and Jξ = ν.
"""

import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .domain import (
    DegenerateImmersion,
    FrameConditionViolated,
    InvalidParameters,
    NotKenmotsu,
    QNotOne,
    ResidualAccumulator,
    SingularMetric,
    VerificationReport,
    informational_check,
    max_abs,
)
from .exprlang import Expr, differentiate, evaluate, parse
from .jets import Jet2, gradients, jet_determinant, jet_inverse, seed_jets, values
from .structures import MetallicStructure
from .tensor import (
    ChartedManifold,
    PointFrame,
    covariant_derivative_11_tensor,
    covariant_derivative_oneform,
    riemann_tensor,
    vector_derivative_tensor,
)

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, float], ...]

RANK_THRESHOLD = 1e-10
NONZERO_COMPONENT = 1e-12
FLAT_PHI = 1e-24


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """An embedded hypersurface of a chart carrying a metallic structure."""

    ambient: ChartedManifold
    structure: MetallicStructure
    params: Tuple[str, ...]
    param_box: Box
    embedding: Tuple[Expr, ...]
    normal_orientation: int = 1

    def __post_init__(self):
        if len(self.embedding) != self.ambient.dim:
            raise InvalidParameters(
                f"Embedding has {len(self.embedding)} components for a "
                f"{self.ambient.dim}-dimensional ambient chart"
            )
        if len(self.params) != self.ambient.dim - 1:
            raise InvalidParameters("A hypersurface needs ambient dim - 1 parameters")
        if len(self.param_box) != len(self.params):
            raise InvalidParameters("Parameter box does not match the parameters")
        if self.normal_orientation not in (1, -1):
            raise InvalidParameters("Normal orientation must be +1 or -1")
        if self.structure.dim != self.ambient.dim:
            raise InvalidParameters("Ambient structure dimension differs from chart")

    @classmethod
    def from_strings(
        cls,
        ambient: ChartedManifold,
        structure: MetallicStructure,
        params: Sequence[str],
        param_box: Sequence[Sequence[float]],
        embedding: Sequence[str],
        normal_orientation: int = 1,
    ) -> "Hypersurface":
        return cls(
            ambient=ambient,
            structure=structure,
            params=tuple(params),
            param_box=tuple((float(lo), float(hi)) for lo, hi in param_box),
            embedding=tuple(parse(e, params) for e in embedding),
            normal_orientation=normal_orientation,
        )

    @property
    def dim(self) -> int:
        return len(self.params)

    def with_orientation(self, orientation: int) -> "Hypersurface":
        return replace(self, normal_orientation=orientation)

    @cached_property
    def tangent_exprs(self) -> Tuple[Tuple[Expr, ...], ...]:
        """[a][i] = ∂x^a/∂u_i."""
        return tuple(
            tuple(differentiate(x, i) for i in range(self.dim)) for x in self.embedding
        )

    @cached_property
    def second_exprs(self) -> Tuple[Tuple[Tuple[Expr, ...], ...], ...]:
        """[a][i][j] = ∂²x^a/∂u_i∂u_j."""
        return tuple(
            tuple(tuple(differentiate(t, j) for j in range(self.dim)) for t in row)
            for row in self.tangent_exprs
        )

    @cached_property
    def metric_derivative_exprs(self) -> Tuple[Tuple[Tuple[Expr, ...], ...], ...]:
        """[a][b][c] = ∂_c g̃_ab in ambient coordinates."""
        n = self.ambient.dim
        return tuple(
            tuple(
                tuple(
                    differentiate(self.ambient.metric_entry(a, b), c) for c in range(n)
                )
                for b in range(n)
            )
            for a in range(n)
        )


@dataclass(frozen=True, eq=False)
class InducedHypersurfaceData:
    """Induced quantities at one parameter point; arrays are values."""

    point: np.ndarray
    tangents: np.ndarray
    normal: np.ndarray
    metric: np.ndarray
    second_form: np.ndarray
    shape: np.ndarray
    phi: np.ndarray
    eta: np.ndarray
    xi: np.ndarray
    measured_p: float
    measured_q: float
    ambient_structure: np.ndarray
    ambient_metric: np.ndarray
    ambient_accel: np.ndarray
    normal_derivative: np.ndarray
    frame: PointFrame
    shape_jets: np.ndarray
    phi_jets: np.ndarray
    eta_jets: np.ndarray
    xi_jets: np.ndarray

    def frame_holds(self, p: float, q: float, tol: float) -> bool:
        return abs(self.measured_p - p) <= tol and abs(self.measured_q - q) <= tol


def _evaluate_all(exprs, env: Sequence[Jet2]) -> np.ndarray:
    array = np.asarray(exprs, dtype=object)
    shape = array.shape
    out = np.empty(shape, dtype=object)
    for index in np.ndindex(*shape):
        out[index] = evaluate(array[index], env)
    return out


def _ambient_christoffel_jets(
    h: Hypersurface, metric_inverse: np.ndarray, env: Sequence[Jet2]
) -> np.ndarray:
    """Γ̃^k_ij composed with the embedding, [k, i, j]."""
    n = h.ambient.dim
    dg = _evaluate_all(h.metric_derivative_exprs, env)
    gamma = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            first_kind = [dg[j, m, i] + dg[i, m, j] - dg[i, j, m] for m in range(n)]
            for k in range(n):
                total = metric_inverse[k, 0] * first_kind[0]
                for m in range(1, n):
                    total = total + metric_inverse[k, m] * first_kind[m]
                gamma[k, i, j] = 0.5 * total
                gamma[k, j, i] = gamma[k, i, j]
    return gamma


def _unit_normal_jets(
    h: Hypersurface, tangents: np.ndarray, inverse: np.ndarray
) -> np.ndarray:
    """ν^a = g̃^{ab} n_b / |n| with n the cofactor covector of the tangents."""
    count = tangents.shape[0]
    covector = np.empty(count, dtype=object)
    for b in range(count):
        minor = np.delete(tangents, b, axis=0)
        det = jet_determinant(minor)
        covector[b] = det if b % 2 == 0 else -det
    raised = np.dot(inverse, covector)
    norm_squared = np.dot(covector, raised)
    if norm_squared.value <= 0.0:
        raise DegenerateImmersion("Normal covector vanishes")
    normal = raised / norm_squared.sqrt()
    components = values(normal)
    sign = 1.0
    for value in components[::-1]:
        if abs(value) > NONZERO_COMPONENT:
            sign = 1.0 if value > 0 else -1.0
            break
    return normal * (sign * h.normal_orientation)


def induced_data(h: Hypersurface, u: Sequence[float]) -> InducedHypersurfaceData:
    """All induced quantities at ``u`` without checking the frame condition."""
    env = seed_jets(u)
    n = h.dim
    x = _evaluate_all(h.embedding, env)
    tangents = _evaluate_all(h.tangent_exprs, env)
    second = _evaluate_all(h.second_exprs, env)
    tangent_values = values(tangents)
    singular = np.linalg.svd(tangent_values, compute_uv=False)
    if singular.size == 0 or singular[-1] <= RANK_THRESHOLD * max(singular[0], 1.0):
        raise DegenerateImmersion(f"Embedding loses rank at {list(u)}")

    ambient_env = tuple(x)
    g_ambient = h.ambient.metric_jets_in(ambient_env)
    try:
        g_ambient_inverse = jet_inverse(g_ambient)
    except np.linalg.LinAlgError as e:
        raise SingularMetric(f"Ambient metric not invertible at {list(u)}") from e
    gamma_ambient = _ambient_christoffel_jets(h, g_ambient_inverse, ambient_env)
    j_ambient = h.structure.J.jets_in(ambient_env)

    metric = np.dot(tangents.T, np.dot(g_ambient, tangents))
    frame = PointFrame.from_metric_jets(u, metric)
    metric_inverse = jet_inverse(metric)

    normal = _unit_normal_jets(h, tangents, g_ambient_inverse)
    normal_lower = np.dot(g_ambient, normal)

    count = h.ambient.dim
    accel = np.empty((count, n, n), dtype=object)
    for b in range(count):
        for i in range(n):
            for j in range(n):
                total = second[b, i, j]
                for c in range(count):
                    for d in range(count):
                        term = gamma_ambient[b, c, d] * tangents[c, i]
                        total = total + term * tangents[d, j]
                accel[b, i, j] = total
    second_form = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            second_form[i, j] = np.dot(normal_lower, accel[:, i, j])
    shape = np.dot(metric_inverse, second_form)

    j_tangents = np.dot(j_ambient, tangents)
    phi_lower = np.dot(tangents.T, np.dot(g_ambient, j_tangents))
    phi = np.dot(metric_inverse, phi_lower)
    eta = np.dot(normal_lower, j_tangents)
    j_normal = np.dot(j_ambient, normal)
    tangential = np.dot(tangents.T, np.dot(g_ambient, j_normal))
    xi = np.dot(metric_inverse, tangential) / float(h.structure.q)

    normal_values = values(normal)
    gamma_values = values(gamma_ambient)
    normal_derivative = gradients(normal) + np.einsum(
        "acd,ci,d->ai", gamma_values, tangent_values, normal_values
    )
    return InducedHypersurfaceData(
        point=np.asarray(u, dtype=float),
        tangents=tangent_values,
        normal=normal_values,
        metric=frame.metric,
        second_form=values(second_form),
        shape=values(shape),
        phi=values(phi),
        eta=values(eta),
        xi=values(xi),
        measured_p=float(np.dot(j_normal, normal_lower).value),
        measured_q=float(np.dot(tangential, np.dot(metric_inverse, tangential)).value),
        ambient_structure=values(j_ambient),
        ambient_metric=values(g_ambient),
        ambient_accel=values(accel),
        normal_derivative=normal_derivative,
        frame=frame,
        shape_jets=shape,
        phi_jets=phi,
        eta_jets=eta,
        xi_jets=xi,
    )


def induced_metric(h: Hypersurface, u: Sequence[float]) -> np.ndarray:
    """g_ij = g̃(∂x/∂u_i, ∂x/∂u_j)."""
    return induced_data(h, u).metric


def unit_normal(h: Hypersurface, u: Sequence[float]) -> np.ndarray:
    return induced_data(h, u).normal


def shape_operator(h: Hypersurface, u: Sequence[float]) -> np.ndarray:
    """A with ∇̃_X ν = −AX, in the parameter basis."""
    return induced_data(h, u).shape


def induce_structure(
    h: Hypersurface, u: Sequence[float], tol: float
) -> InducedHypersurfaceData:
    """Induced (φ, η, ξ) after the q = 1 gate and the frame condition."""
    s = h.structure
    if s.q != 1:
        raise QNotOne(s.q)
    data = induced_data(h, u)
    if not data.frame_holds(s.p, s.q, tol):
        raise FrameConditionViolated(data.measured_p, data.measured_q, s.p, s.q)
    return data


def verify_shape_operator(
    h: Hypersurface, samples: np.ndarray, tol: float
) -> VerificationReport:
    """Normal, self-adjointness of A and the Gauss and Weingarten formulas."""
    unit = ResidualAccumulator("normal_unit", tol)
    orthogonal = ResidualAccumulator("normal_orthogonal", tol)
    self_adjoint = ResidualAccumulator("self_adjoint", tol)
    gauss = ResidualAccumulator("gauss_formula", tol)
    weingarten = ResidualAccumulator("weingarten_formula", tol)
    principal: List[float] = []
    for point in samples:
        data = induced_data(h, point)
        g_amb, nu, tangents = data.ambient_metric, data.normal, data.tangents
        unit.add(point, abs(float(nu @ g_amb @ nu) - 1.0))
        orthogonal.add(point, max_abs(tangents.T @ g_amb @ nu))
        lowered = data.metric @ data.shape
        self_adjoint.add(point, max_abs(lowered - lowered.T))
        rebuilt = np.einsum(
            "ak,kij->aij", tangents, data.frame.christoffel
        ) + np.einsum("ij,a->aij", data.second_form, nu)
        gauss.add(point, max_abs(data.ambient_accel - rebuilt))
        weingarten.add(point, max_abs(data.normal_derivative + tangents @ data.shape))
        principal.extend(np.linalg.eigvals(data.shape).real.tolist())
    if principal:
        gauss.note(
            f"principal curvatures range over [{min(principal):.12g}, "
            f"{max(principal):.12g}]"
        )
    return VerificationReport(
        checks=[
            unit.result(),
            orthogonal.result(),
            self_adjoint.result(),
            gauss.result(),
            weingarten.result(),
        ]
    )


def verify_induced_structure(
    h: Hypersurface, samples: np.ndarray, tol: float
) -> VerificationReport:
    """Frame condition and the algebraic identities of the induced (φ, η, ξ)."""
    s = h.structure
    n = h.dim
    identity = np.eye(n)
    frame_p = ResidualAccumulator("frame_p", tol)
    frame_q = ResidualAccumulator("frame_q", tol)
    dual = ResidualAccumulator("eta_dual", tol)
    quadratic = ResidualAccumulator("quadratic_identity", tol)
    unit = ResidualAccumulator("eta_xi", tol)
    kills_xi = ResidualAccumulator("phi_xi", tol)
    eta_phi = ResidualAccumulator("eta_phi", tol)
    j_xi = ResidualAccumulator("j_xi_normal", tol)
    for point in samples:
        data = induce_structure(h, point, tol)
        phi, eta, xi = data.phi, data.eta, data.xi
        frame_p.add(point, abs(data.measured_p - s.p))
        frame_q.add(point, abs(data.measured_q - s.q))
        dual.add(point, max_abs(eta - s.q * (data.metric @ xi)))
        quadratic.add(
            point,
            max_abs(phi @ phi - s.p * phi - s.q * (identity - np.outer(xi, eta))),
        )
        unit.add(point, abs(float(eta @ xi) - 1.0))
        kills_xi.add(point, max_abs(phi @ xi))
        eta_phi.add(point, max_abs(eta @ phi))
        j_xi.add(
            point,
            max_abs(data.ambient_structure @ (data.tangents @ xi) - data.normal),
        )
    return VerificationReport(
        checks=[
            frame_p.result(),
            frame_q.result(),
            dual.result(),
            quadratic.result(),
            unit.result(),
            kills_xi.result(),
            eta_phi.result(),
            j_xi.result(),
        ]
    )


def _derivatives(data: InducedHypersurfaceData):
    """Intrinsic ∇φ [a,b,m], ∇ξ [k,m], ∇η [b,m] and ∇A [a,b,m]."""
    frame = data.frame
    dphi = covariant_derivative_11_tensor(frame, data.phi, gradients(data.phi_jets))
    dxi = vector_derivative_tensor(frame, data.xi, gradients(data.xi_jets))
    deta = covariant_derivative_oneform(frame, data.eta, gradients(data.eta_jets))
    dshape = covariant_derivative_11_tensor(
        frame, data.shape, gradients(data.shape_jets)
    )
    return dphi, dxi, deta, dshape


def verify_structure_equations(
    h: Hypersurface, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    (∇_X φ)Y = η(Y)AX + g(AX,Y)ξ, ∇_X ξ = pAX − φAX, Aξ = 0 and
    (∇_X η)Y = p g(AX,Y) − g(AX,φY).
    """
    p = h.structure.p
    phi_derivative = ResidualAccumulator("phi_derivative", tol)
    xi_derivative = ResidualAccumulator("xi_derivative", tol)
    shape_xi = ResidualAccumulator("shape_xi", tol)
    eta_derivative = ResidualAccumulator("eta_derivative", tol)
    for point in samples:
        data = induce_structure(h, point, tol)
        dphi, dxi, deta, _ = _derivatives(data)
        g, a, phi = data.metric, data.shape, data.phi
        expected_phi = np.einsum("b,am->abm", data.eta, a) + np.einsum(
            "bm,a->abm", g @ a, data.xi
        )
        phi_derivative.add(point, max_abs(dphi - expected_phi))
        xi_derivative.add(point, max_abs(dxi - (p * a - phi @ a)))
        shape_xi.add(point, max_abs(a @ data.xi))
        eta_derivative.add(point, max_abs(deta - (p * (g @ a) - phi.T @ g @ a)))
    return VerificationReport(
        checks=[
            phi_derivative.result(),
            xi_derivative.result(),
            shape_xi.result(),
            eta_derivative.result(),
        ]
    )


def killing_check(
    h: Hypersurface,
    samples: np.ndarray,
    tol: float,
    perturbation: Optional[np.ndarray] = None,
) -> VerificationReport:
    """
    ξ is Killing iff φA + Aφ = 2pA. Both sides are measured; the enforced
    entry counts samples where their verdicts disagree.

    ``perturbation`` is added to φ in the criterion only.
    """
    p = h.structure.p
    criterion = ResidualAccumulator("criterion", tol, enforced=False)
    killing = ResidualAccumulator("killing_equation", tol, enforced=False)
    agreement = ResidualAccumulator("equivalence", 0.0)
    for point in samples:
        data = induce_structure(h, point, tol)
        _, dxi, _, _ = _derivatives(data)
        a = data.shape
        phi = data.phi if perturbation is None else data.phi + perturbation
        lhs = max_abs(phi @ a + a @ phi - 2 * p * a)
        lowered = data.metric @ dxi
        rhs = max_abs(lowered + lowered.T)
        criterion.add(point, lhs)
        killing.add(point, rhs)
        agreement.add(point, 0.0 if (lhs <= tol) == (rhs <= tol) else 1.0)
    verdict = agreement.result()
    if killing.max_residual <= tol:
        verdict = verdict.with_notes("ξ is a Killing field")
    return VerificationReport(checks=[criterion.result(), killing.result(), verdict])


def estimate_hypersurface_beta(data: InducedHypersurfaceData) -> float:
    """Least squares β in A = βφ, zero when φ vanishes."""
    norm = float(np.sum(data.phi * data.phi))
    if norm <= FLAT_PHI:
        return 0.0
    return float(np.sum(data.shape * data.phi)) / norm


def kenmotsu_hypersurface_check(
    h: Hypersurface,
    samples: np.ndarray,
    tol: float,
    beta: Optional[Expr] = None,
) -> VerificationReport:
    """
    For a (β,φ)-Kenmotsu hypersurface: φA = Aφ, A = βφ and
    A² = βpA + β²(I − η⊗ξ). β is estimated pointwise when not given.
    Raises NotKenmotsu when (∇_X φ)Y = β(g(X,φY)ξ + η(Y)φX) fails.
    """
    s = h.structure
    identity = np.eye(h.dim)
    gathered = []
    worst = 0.0
    for point in samples:
        data = induce_structure(h, point, tol)
        if beta is None:
            b = estimate_hypersurface_beta(data)
        else:
            b = evaluate(beta, seed_jets(point)).value
        dphi, _, _, _ = _derivatives(data)
        g, phi, eta, xi = data.metric, data.phi, data.eta, data.xi
        expected = b * (
            np.einsum("mb,a->abm", g @ phi, xi) + np.einsum("b,am->abm", eta, phi)
        )
        worst = max(worst, max_abs(dphi - expected))
        gathered.append((point, data, b))
    if worst > tol:
        raise NotKenmotsu(worst)

    commute = ResidualAccumulator("commute", tol)
    proportional = ResidualAccumulator("shape_from_phi", tol)
    square = ResidualAccumulator("shape_square", tol)
    chain = ResidualAccumulator("shape_square_chain", tol)
    geodesic = ResidualAccumulator("totally_geodesic", tol)
    betas = []
    for point, data, b in gathered:
        a, phi = data.shape, data.phi
        projector = identity - np.outer(data.xi, data.eta)
        commute.add(point, max_abs(phi @ a - a @ phi))
        proportional.add(point, max_abs(a - b * phi))
        direct = a @ a - b * s.p * a - b * b * projector
        square.add(point, max_abs(direct))
        chained = (
            b * b * (s.p * phi + s.q * projector) - b * s.p * a - b * b * projector
        )
        chain.add(point, max_abs(direct - chained))
        geodesic.add(point, max_abs(a))
        betas.append(b)
    checks = [commute.result(), proportional.result(), square.result(), chain.result()]
    if betas and max(abs(b) for b in betas) <= tol:
        checks.append(geodesic.result().with_notes("β vanishes: totally geodesic"))
    elif betas:
        checks.append(
            informational_check(
                "beta",
                f"β ranges over [{min(betas):.12g}, {max(betas):.12g}]",
            )
        )
    return VerificationReport(checks=checks)


def curvature_xi_check(
    h: Hypersurface, samples: np.ndarray, tol: float
) -> VerificationReport:
    """
    R(X,Y)ξ = p((∇_X A)Y − (∇_Y A)X) − φ((∇_X A)Y − (∇_Y A)X) where the
    frame condition holds; R(X,Y)ξ = 0 where A is parallel.
    """
    s = h.structure
    identity_check = ResidualAccumulator("curvature_identity", tol)
    corollary = ResidualAccumulator("parallel_shape_corollary", tol)
    feasible = 0
    rejected: Optional[str] = None
    for point in samples:
        try:
            data = induce_structure(h, point, tol)
        except FrameConditionViolated as e:
            rejected = rejected or str(e)
            continue
        feasible += 1
        curvature = riemann_tensor(data.frame)
        _, _, _, dshape = _derivatives(data)
        r_xi = np.einsum("abcd,b->acd", curvature, data.xi)
        swapped = dshape - np.swapaxes(dshape, 1, 2)
        alternating = np.swapaxes(swapped, 1, 2)
        expected = s.p * alternating - np.einsum("ak,kcd->acd", data.phi, alternating)
        identity_check.add(point, max_abs(r_xi - expected))
        if max_abs(dshape) <= tol:
            corollary.add(point, max_abs(r_xi))
    feasibility = informational_check(
        "frame_feasible",
        f"frame condition holds at {feasible} of {len(samples)} samples",
    )
    if rejected:
        feasibility = feasibility.with_notes(rejected)
    checks = [feasibility]
    if feasible:
        checks.append(identity_check.result())
        result = corollary.result()
        if result.samples == 0:
            result = replace(
                result, enforced=False, notes=("shape operator is not parallel",)
            )
        checks.append(result)
    return VerificationReport(checks=checks)


def verify_metallic_shaped(
    h: Hypersurface, samples: np.ndarray, tol: float
) -> VerificationReport:
    """A² = pA + qI with A g-self-adjoint; parallel A makes it locally metallic."""
    s = h.structure
    identity = np.eye(h.dim)
    polynomial = ResidualAccumulator("polynomial_identity", tol)
    self_adjoint = ResidualAccumulator("self_adjoint", tol)
    parallel = ResidualAccumulator("parallel", tol, enforced=False)
    eigenvalues: List[float] = []
    for point in samples:
        data = induced_data(h, point)
        a = data.shape
        polynomial.add(point, max_abs(a @ a - s.p * a - s.q * identity))
        lowered = data.metric @ a
        self_adjoint.add(point, max_abs(lowered - lowered.T))
        dshape = covariant_derivative_11_tensor(
            data.frame, a, gradients(data.shape_jets)
        )
        parallel.add(point, max_abs(dshape))
        eigenvalues.extend(np.linalg.eigvals(a).real.tolist())
    if eigenvalues:
        distinct = sorted({round(v, 9) for v in eigenvalues})
        polynomial.note(
            "shape operator eigenvalues: " + ", ".join(f"{v:.9f}" for v in distinct)
        )
        polynomial.note(f"σ = {s.sigma:.12g}, σ̄ = {s.sigma_bar:.12g}")
    return VerificationReport(
        checks=[polynomial.result(), self_adjoint.result(), parallel.result()]
    )
