"""
Unit tests for warped products.

These tests verify that:
1. The product connection matches its closed forms
2. The induced φ-structure is an almost quadratic φ-structure
3. Parallel fibers give Kenmotsu warped products with β = −f′/f
4. Preconditions (positive warping, fiber structure, parallel fiber) are enforced
"""

import math

import numpy as np
import pytest

from metallic.domain import (
    FiberNotLocallyMetallic,
    InvalidParameters,
    MissingFiberStructure,
    NonPositiveWarping,
    UnknownVariable,
)
from metallic.exprlang import Var, parse
from metallic.structures import MetallicStructure, verify_quadratic_phi
from metallic.tensor import ChartedManifold, TensorField11, verify_levi_civita
from metallic.warped import (
    WarpedProduct,
    check_warping,
    estimate_beta,
    induce_phi,
    nijenhuis_phi_check,
    theorem_qc_check,
    verify_az_formulas,
    verify_kenmotsu,
    verify_lift_identity,
    warped_metric,
)

from .conftest import SIGMA, SIGMA_BAR

TOL = 1e-9


@pytest.fixture
def fiber_r2():
    return ChartedManifold.euclidean(["x1", "x2"], [(-1, 1), (-1, 1)])


class TestWarpedProduct:
    """Test construction and the warped metric."""

    def test_product_chart(self, exp_warped):
        """Test coordinates, dimension and sample box of the product."""
        assert exp_warped.coords == ("t", "x1", "x2")
        assert exp_warped.dim == 3
        assert exp_warped.sample_box[0] == (-1.0, 1.0)

    def test_warped_metric(self, exp_warped):
        """Test g = diag(1, e^{2t}, e^{2t})."""
        m = warped_metric(exp_warped)
        t = 0.4
        frame = m.frame([t, 0.1, -0.2])
        np.testing.assert_allclose(
            frame.metric, np.diag([1.0, math.exp(2 * t), math.exp(2 * t)])
        )

    def test_warping_at(self, cosh_sphere):
        """Test f and f′ at a base point."""
        f, df = cosh_sphere.warping_at(0.5)
        assert f == pytest.approx(math.cosh(0.5))
        assert df == pytest.approx(math.sinh(0.5))

    def test_warped_metric_is_levi_civita_consistent(self, cosh_sphere, sampler):
        """Test the Levi-Civita suite on the product chart."""
        m = warped_metric(cosh_sphere)
        points = sampler.generate_points(m.sample_box)
        assert verify_levi_civita(m, points, TOL).passed

    def test_nonpositive_warping(self, fiber_r2):
        """Test that f = t on [−1, 1] is rejected."""
        wp = WarpedProduct.from_strings(fiber_r2, "t")
        with pytest.raises(NonPositiveWarping):
            check_warping(wp)
        with pytest.raises(NonPositiveWarping):
            warped_metric(wp)

    def test_positive_warping_on_shifted_interval(self, fiber_r2):
        """Test that f = t is accepted on [0.5, 2]."""
        check_warping(WarpedProduct.from_strings(fiber_r2, "t", (0.5, 2.0)))

    def test_warping_depends_only_on_base(self, fiber_r2):
        """Test that fiber coordinates are rejected in the warping function."""
        with pytest.raises(UnknownVariable):
            WarpedProduct.from_strings(fiber_r2, "exp(x1)")
        with pytest.raises(InvalidParameters):
            WarpedProduct(fiber=fiber_r2, warping=Var("x1", 1))

    def test_base_coordinate_clash(self, fiber_r2):
        """Test that the base coordinate must not be a fiber coordinate."""
        with pytest.raises(InvalidParameters):
            WarpedProduct.from_strings(fiber_r2, "1", base_coord="x1")


class TestConnectionFormulas:
    """Test the Christoffel symbols of the warped metric."""

    @pytest.mark.parametrize("fixture", ["exp_warped", "cosh_sphere"])
    def test_closed_forms(self, fixture, sampler, request):
        """Test ∇_∂t ∂t = 0, ∇_∂t X = (f′/f)X and the fiber formula."""
        wp = request.getfixturevalue(fixture)
        points = sampler.generate_points(wp.sample_box)
        report = verify_az_formulas(wp, points, TOL)
        assert report.passed
        assert [c.name for c in report.checks] == ["base_geodesic", "mixed", "fiber"]


class TestInducedStructure:
    """Test the induced almost quadratic φ-structure."""

    def test_induced_phi_components(self, exp_warped):
        """Test φ = diag(0, σ, σ̄), η = dt and ξ = ∂t."""
        induced = induce_phi(exp_warped)
        s = induced.structure
        phi, eta, xi = s.values_at([0.0, 0.0, 0.0])
        np.testing.assert_allclose(phi, np.diag([0.0, SIGMA, SIGMA_BAR]))
        np.testing.assert_array_equal(eta, [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(xi, [1.0, 0.0, 0.0])
        assert (s.a, s.b) == (1.0, 1.0)

    def test_induced_phi_is_quadratic(self, cosh_sphere, sampler):
        """Test every identity of the induced structure, metric ones included."""
        induced = induce_phi(cosh_sphere)
        points = sampler.generate_points(cosh_sphere.sample_box)
        report = verify_quadratic_phi(induced.manifold, induced.structure, points, TOL)
        assert report.passed

    def test_missing_fiber_structure(self, fiber_r2):
        """Test that a bare warped product cannot induce φ."""
        wp = WarpedProduct.from_strings(fiber_r2, "exp(t)")
        with pytest.raises(MissingFiberStructure):
            induce_phi(wp)
        points = np.zeros((1, 3))
        with pytest.raises(MissingFiberStructure):
            verify_lift_identity(wp, points, TOL)
        with pytest.raises(MissingFiberStructure):
            theorem_qc_check(wp, points, TOL)

    def test_nijenhuis_of_induced_phi(self, exp_warped, sampler):
        """Test that a constant fiber structure induces N_φ = 0."""
        induced = induce_phi(exp_warped)
        points = sampler.generate_points(exp_warped.sample_box)
        report = nijenhuis_phi_check(induced.manifold, induced.structure, points, TOL)
        assert report.passed

    def test_nonintegrable_fiber_is_detected(self, sampler):
        """Test N_φ ≠ 0 when the σ-eigenplane of J is the contact plane."""
        fiber = ChartedManifold.euclidean(["x1", "x2", "x3"], [(-1, 1)] * 3)
        rows = [
            ["(1+sqrt(5))/2", "0", "0"],
            ["0", "(1+sqrt(5))/2", "0"],
            ["sqrt(5)*x2", "0", "(1-sqrt(5))/2"],
        ]
        j = TensorField11.from_strings(rows, fiber.coords)
        wp = WarpedProduct.from_strings(
            fiber, "exp(t)", structure=MetallicStructure(p=1, q=1, J=j)
        )
        induced = induce_phi(wp)
        points = sampler.generate_points(wp.sample_box)
        assert verify_quadratic_phi(
            induced.manifold, induced.structure, points, TOL, metric_checks=False
        ).passed
        report = nijenhuis_phi_check(induced.manifold, induced.structure, points, TOL)
        assert report.passed is False
        assert report.check("nijenhuis").max_residual > 1e-3
        assert report.check("nijenhuis").max_residual == pytest.approx(5.0)


class TestKenmotsu:
    """Test the Kenmotsu characterization of warped products."""

    def test_exp_warping_has_beta_minus_one(self, exp_warped, sampler):
        """Test β = −1 for f = e^t."""
        points = sampler.generate_points(exp_warped.sample_box)
        report = theorem_qc_check(
            exp_warped, points, TOL, expected_beta=parse("-1", exp_warped.coords)
        )
        assert report.passed
        assert report.check("beta_expected").passed
        induced = induce_phi(exp_warped)
        estimate = estimate_beta(induced.manifold, induced.structure, points[0])
        assert estimate == pytest.approx(-1.0)

    def test_cosh_sphere(self, cosh_sphere, sampler):
        """Test β = −tanh t on the warped sphere."""
        points = sampler.generate_points(cosh_sphere.sample_box)
        expected = parse("-tanh(t)", cosh_sphere.coords)
        report = theorem_qc_check(cosh_sphere, points, 1e-8, expected_beta=expected)
        assert report.passed, [c.to_dict() for c in report.failed_checks]

    def test_wrong_beta_fails(self, exp_warped, sampler):
        """Test that β = +1 does not satisfy the Kenmotsu identities."""
        induced = induce_phi(exp_warped)
        points = sampler.generate_points(exp_warped.sample_box)
        report = verify_kenmotsu(
            induced.manifold,
            induced.structure,
            parse("1", exp_warped.coords),
            points,
            TOL,
        )
        failed = {c.name for c in report.failed_checks}
        assert failed == {"phi_derivative", "xi_derivative"}

    def test_cosymplectic_product(self, golden_structure, fiber_r2, sampler):
        """Test that f = 1 gives β = 0."""
        wp = WarpedProduct.from_strings(fiber_r2, "1", structure=golden_structure)
        points = sampler.generate_points(wp.sample_box)
        expected = parse("0", wp.coords)
        assert theorem_qc_check(wp, points, TOL, expected_beta=expected).passed

    def test_twisted_fiber_is_rejected(self, twisted_structure, sampler):
        """Test FiberNotLocallyMetallic for a non-parallel fiber structure."""
        fiber = ChartedManifold.euclidean(["x", "y"], [(-1, 1), (-1, 1)])
        wp = WarpedProduct.from_strings(fiber, "exp(t)", structure=twisted_structure)
        points = sampler.generate_points(wp.sample_box)
        with pytest.raises(FiberNotLocallyMetallic) as info:
            theorem_qc_check(wp, points, TOL)
        assert info.value.residual > TOL

    def test_lift_identity_holds_for_any_fiber(self, twisted_structure, sampler):
        """Test the lift identity on a non-parallel fiber structure."""
        fiber = ChartedManifold.euclidean(["x", "y"], [(-1, 1), (-1, 1)])
        wp = WarpedProduct.from_strings(fiber, "cosh(t)", structure=twisted_structure)
        points = sampler.generate_points(wp.sample_box)
        assert verify_lift_identity(wp, points, TOL).passed
