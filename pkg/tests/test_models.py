"""
Unit tests for the configuration schema.

These tests verify that:
1. Valid documents load, with numbers accepted as expressions
2. Shapes, ranges and check names are validated
3. Checks demand the sections they read
"""

import pytest
from pydantic import ValidationError

from metallic.models import (
    KNOWN_CHECKS,
    ChartConfig,
    HypersurfaceConfig,
    MetallicConfig,
    QuadraticConfig,
    VerificationConfig,
    required_sections,
)

GOLDEN = {
    "p": 1,
    "q": 1,
    "J": [["(1+sqrt(5))/2", 0], [0, "(1-sqrt(5))/2"]],
}
PLANE = {"coords": ["x", "y"], "sample_box": [[-1, 1], [-1, 1]]}


class TestChartConfig:
    """Test chart validation."""

    def test_defaults_to_euclidean(self):
        """Test that the metric is optional."""
        chart = ChartConfig(**PLANE)
        assert chart.metric is None
        assert chart.sample_box == [(-1.0, 1.0), (-1.0, 1.0)]

    def test_numbers_become_expressions(self):
        """Test that numeric metric entries are stored as text."""
        chart = ChartConfig(**PLANE, metric=[[1, 0], [0, "x^2 + 1"]])
        assert chart.metric == [["1", "0"], ["0", "x^2 + 1"]]

    @pytest.mark.parametrize(
        "changes",
        [
            {"coords": ["x", "x"]},
            {"sample_box": [[-1, 1]]},
            {"sample_box": [[1, -1], [-1, 1]]},
            {"metric": [["1", "0"]]},
            {"metric": [["1"]]},
            {"coords": []},
        ],
    )
    def test_invalid_charts(self, changes):
        """Test rejection of malformed charts."""
        with pytest.raises(ValidationError):
            ChartConfig(**{**PLANE, **changes})

    def test_extra_fields_forbidden(self):
        """Test that misspelled keys are rejected."""
        with pytest.raises(ValidationError):
            ChartConfig(**PLANE, metrc=[["1", "0"], ["0", "1"]])


class TestStructureConfigs:
    """Test metallic and quadratic sections."""

    def test_metallic_section(self):
        """Test a valid golden section."""
        section = MetallicConfig(**GOLDEN)
        assert section.J[0][1] == "0"

    @pytest.mark.parametrize(
        "changes",
        [{"p": 0}, {"q": 0}, {"J": [["1", "0"]]}, {"J": [[True, 0], [0, 1]]}],
    )
    def test_invalid_metallic(self, changes):
        """Test rejection of bad constants, non-square J and booleans."""
        with pytest.raises(ValidationError):
            MetallicConfig(**{**GOLDEN, **changes})

    def test_quadratic_section(self):
        """Test a valid quadratic section and its constraints."""
        base = {"a": 4, "b": 5, "phi": [[2, 1], [9, 2]], "eta": [0, 0], "xi": [0, 0]}
        assert QuadraticConfig(**base).metric_checks is False
        with pytest.raises(ValidationError, match="b must be nonzero"):
            QuadraticConfig(**{**base, "b": 0})
        with pytest.raises(ValidationError, match="a\\^2 \\+ 4b"):
            QuadraticConfig(**{**base, "a": 2, "b": -1})
        with pytest.raises(ValidationError, match="same dimension"):
            QuadraticConfig(**{**base, "eta": [0, 0, 1]})

    def test_hypersurface_section(self):
        """Test orientation and parameter box validation."""
        base = {"params": ["u"], "param_box": [[-1, 1]], "embedding": ["u", 0]}
        assert HypersurfaceConfig(**base).embedding == ["u", "0"]
        with pytest.raises(ValidationError):
            HypersurfaceConfig(**{**base, "normal_orientation": 0})
        with pytest.raises(ValidationError):
            HypersurfaceConfig(**{**base, "param_box": [[-1, 1], [0, 1]]})


class TestVerificationConfig:
    """Test whole-document validation."""

    def test_valid_document(self):
        """Test a minimal golden document."""
        config = VerificationConfig(
            checks=["metallic"], manifold=PLANE, metallic=GOLDEN
        )
        assert config.samples is None
        assert config.tolerances == {}

    def test_unknown_check(self):
        """Test that unknown check names are listed."""
        with pytest.raises(ValidationError, match="unknown checks: bogus"):
            VerificationConfig(checks=["bogus"], manifold=PLANE)

    def test_empty_checks(self):
        """Test that at least one check is required."""
        with pytest.raises(ValidationError):
            VerificationConfig(checks=[], manifold=PLANE)

    def test_missing_section(self):
        """Test that checks demand their sections."""
        with pytest.raises(ValidationError, match="needs a 'metallic' section"):
            VerificationConfig(checks=["metallic"], manifold=PLANE)
        with pytest.raises(ValidationError, match="needs a 'warped' section"):
            VerificationConfig(checks=["qc"])

    def test_tolerances(self):
        """Test validation of per-check tolerances."""
        with pytest.raises(ValidationError, match="unknown check 'nope'"):
            VerificationConfig(
                checks=["metallic"],
                manifold=PLANE,
                metallic=GOLDEN,
                tolerances={"nope": 1e-3},
            )
        with pytest.raises(ValidationError, match="must be positive"):
            VerificationConfig(
                checks=["metallic"],
                manifold=PLANE,
                metallic=GOLDEN,
                tolerances={"metallic": 0},
            )

    def test_run_settings(self):
        """Test ranges of samples, tolerance and format."""
        base = {"checks": ["metallic"], "manifold": PLANE, "metallic": GOLDEN}
        with pytest.raises(ValidationError):
            VerificationConfig(**base, samples=0)
        with pytest.raises(ValidationError):
            VerificationConfig(**base, tol=0)
        with pytest.raises(ValidationError):
            VerificationConfig(**base, format="xml")

    def test_required_sections(self):
        """Test the sections read by each check."""
        bare = VerificationConfig(checks=["metallic"], manifold=PLANE, metallic=GOLDEN)
        assert required_sections("levi_civita", bare) == ("manifold",)
        assert required_sections("spectral", bare) == ("manifold", "quadratic")
        assert required_sections("az", bare) == ("warped",)
        expected = ("manifold", "metallic", "hypersurface")
        assert required_sections("killing", bare) == expected
        assert len(KNOWN_CHECKS) == len(set(KNOWN_CHECKS))
