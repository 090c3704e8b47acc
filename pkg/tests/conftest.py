"""
pytest configuration for the metallic verification tests.

This file configures:
1. Test markers for different test types
2. Fixtures for charts, structures and hypersurfaces used across modules
3. Deterministic sample sets
"""

import math

import numpy as np
import pytest

SIGMA = (1 + math.sqrt(5)) / 2
SIGMA_BAR = (1 - math.sqrt(5)) / 2


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line("markers", "unit: mark test as a unit test")
    config.addinivalue_line("markers", "integration: mark test as an integration test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


@pytest.fixture
def sampler():
    """Fixture providing the default deterministic sampling strategy."""
    from metallic.sampling import SamplingStrategy

    return SamplingStrategy(count=20, seed=7)


@pytest.fixture
def plane_r2():
    """Euclidean R^2 on the unit box."""
    from metallic.tensor import ChartedManifold

    return ChartedManifold.euclidean(["x", "y"], [(-1, 1), (-1, 1)])


@pytest.fixture
def polar_chart():
    """Flat metric in polar coordinates, away from the origin."""
    from metallic.tensor import ChartedManifold

    return ChartedManifold.from_strings(
        ["r", "theta"], [(0.5, 2.0), (-3.0, 3.0)], [["1", "0"], ["0", "r^2"]]
    )


@pytest.fixture
def round_sphere():
    """Unit sphere in (theta, psi) coordinates."""
    from metallic.tensor import ChartedManifold

    return ChartedManifold.from_strings(
        ["theta", "psi"],
        [(0.3, 2.8), (-3.0, 3.0)],
        [["1", "0"], ["0", "sin(theta)^2"]],
    )


@pytest.fixture
def golden_structure():
    """J = diag(σ, σ̄) on R^2."""
    from metallic.structures import MetallicStructure
    from metallic.tensor import TensorField11

    return MetallicStructure(
        p=1, q=1, J=TensorField11.constant(np.diag([SIGMA, SIGMA_BAR]))
    )


@pytest.fixture
def twisted_structure():
    """A golden structure on R^2 whose eigenframe rotates with x: not parallel."""
    from metallic.structures import MetallicStructure
    from metallic.tensor import TensorField11

    c = "cos(2*x)"
    s = "sin(2*x)"
    rows = [
        [f"1/2 + sqrt(5)/2*{c}", f"sqrt(5)/2*{s}"],
        [f"sqrt(5)/2*{s}", f"1/2 - sqrt(5)/2*{c}"],
    ]
    return MetallicStructure(p=1, q=1, J=TensorField11.from_strings(rows, ["x", "y"]))


@pytest.fixture
def dk_structure():
    """The constant quadratic φ-structure on R^4 with a = 4, b = 5."""
    from metallic.structures import constant_structure

    phi = [[2, 1, 0, 0], [9, 2, 0, 0], [0, 0, 5, 0], [0, 0, 0, 0]]
    e4 = [0, 0, 0, 1]
    return constant_structure(4.0, 5.0, phi, e4, e4)


@pytest.fixture
def r4():
    from metallic.tensor import ChartedManifold

    return ChartedManifold.euclidean(["x1", "x2", "x3", "x4"], [(-1, 1)] * 4)


@pytest.fixture
def golden_line(golden_structure):
    """A line in R^2 along which the golden frame condition holds."""
    from metallic.hypersurface import Hypersurface
    from metallic.tensor import ChartedManifold

    ambient = ChartedManifold.euclidean(["x", "y"], [(-2, 2), (-2, 2)])
    return Hypersurface.from_strings(
        ambient,
        golden_structure,
        ["u"],
        [(-1, 1)],
        ["-sqrt((5-sqrt(5))/10)*u", "sqrt((5+sqrt(5))/10)*u"],
    )


@pytest.fixture
def golden_cone():
    """Constant-angle cone in R^3 with J = diag(σ, σ, σ̄)."""
    from metallic.hypersurface import Hypersurface
    from metallic.structures import MetallicStructure
    from metallic.tensor import ChartedManifold, TensorField11

    ambient = ChartedManifold.euclidean(["x", "y", "z"], [(-3, 3)] * 3)
    structure = MetallicStructure(
        p=1, q=1, J=TensorField11.constant(np.diag([SIGMA, SIGMA, SIGMA_BAR]))
    )
    return Hypersurface.from_strings(
        ambient,
        structure,
        ["s", "theta"],
        [(0.5, 2.0), (-3.0, 3.0)],
        [
            "s*sqrt((5-sqrt(5))/10)*cos(theta)",
            "s*sqrt((5-sqrt(5))/10)*sin(theta)",
            "s*sqrt((5+sqrt(5))/10)",
        ],
    )


@pytest.fixture
def golden_sphere():
    """Sphere of radius 1/σ with the inward normal and J = σI."""
    from metallic.hypersurface import Hypersurface
    from metallic.structures import MetallicStructure
    from metallic.tensor import ChartedManifold, TensorField11

    ambient = ChartedManifold.euclidean(["x", "y", "z"], [(-1, 1)] * 3)
    structure = MetallicStructure(p=1, q=1, J=TensorField11.constant(SIGMA * np.eye(3)))
    r = "2/(1+sqrt(5))"
    return Hypersurface.from_strings(
        ambient,
        structure,
        ["theta", "psi"],
        [(0.3, 1.4), (-3.0, 3.0)],
        [
            f"{r}*sin(theta)*cos(psi)",
            f"{r}*sin(theta)*sin(psi)",
            f"{r}*cos(theta)",
        ],
        normal_orientation=-1,
    )


@pytest.fixture
def exp_warped(golden_structure):
    """R x_(e^t) R^2 over the golden fiber."""
    from metallic.tensor import ChartedManifold
    from metallic.warped import WarpedProduct

    fiber = ChartedManifold.euclidean(["x1", "x2"], [(-1, 1), (-1, 1)])
    return WarpedProduct.from_strings(fiber, "exp(t)", structure=golden_structure)


@pytest.fixture
def cosh_sphere():
    """R x_cosh(t) S^2(1/σ) with J = σI on the fiber."""
    from metallic.structures import MetallicStructure
    from metallic.tensor import ChartedManifold, TensorField11
    from metallic.warped import WarpedProduct

    radius2 = "(2/(1+sqrt(5)))^2"
    fiber = ChartedManifold.from_strings(
        ["theta", "psi"],
        [(0.3, 2.8), (-3.0, 3.0)],
        [[radius2, "0"], ["0", f"{radius2}*sin(theta)^2"]],
    )
    structure = MetallicStructure(p=1, q=1, J=TensorField11.constant(SIGMA * np.eye(2)))
    return WarpedProduct.from_strings(fiber, "cosh(t)", structure=structure)
