"""
Unit tests for the sampling strategy.

These tests verify that:
1. Points stay inside the requested box
2. The same seed reproduces the same sequence
3. Different seeds give different sequences
4. Invalid counts and boxes are rejected
"""

import numpy as np
import pytest

from metallic.sampling import SamplingStrategy


class TestSamplingStrategy:
    """Test SamplingStrategy implementation."""

    def test_strategy_initialization(self):
        """Test strategy defaults."""
        strategy = SamplingStrategy()
        assert strategy.count == 100
        assert strategy.seed == 42

    def test_points_inside_box(self):
        """Test that every point lies inside its box."""
        box = [(-1.0, 1.0), (0.5, 2.0), (-3.0, 3.0)]
        points = SamplingStrategy(count=64, seed=3).generate_points(box)
        assert points.shape == (64, 3)
        for axis, (lo, hi) in enumerate(box):
            assert np.all(points[:, axis] >= lo)
            assert np.all(points[:, axis] <= hi)

    def test_same_seed_same_points(self):
        """Test determinism for a fixed seed and count."""
        box = [(0.0, 1.0), (0.0, 1.0)]
        first = SamplingStrategy(count=10, seed=11).generate_points(box)
        second = SamplingStrategy(count=10, seed=11).generate_points(box)
        np.testing.assert_array_equal(first, second)

    def test_different_seeds_differ(self):
        """Test that the seed scrambles the sequence."""
        box = [(0.0, 1.0), (0.0, 1.0)]
        first = SamplingStrategy(count=10, seed=1).generate_points(box)
        second = SamplingStrategy(count=10, seed=2).generate_points(box)
        assert not np.array_equal(first, second)

    def test_degenerate_interval_pins_coordinate(self):
        """Test that lo == hi fixes the coordinate."""
        points = SamplingStrategy(count=5, seed=0).generate_points([(2.0, 2.0)])
        np.testing.assert_array_equal(points[:, 0], np.full(5, 2.0))

    def test_values_and_with_count(self):
        """Test the one-dimensional helper and resizing."""
        strategy = SamplingStrategy(count=4, seed=5)
        values = strategy.generate_values((-1.0, 1.0))
        assert len(values) == 4
        assert all(-1.0 <= v <= 1.0 for v in values)
        bigger = strategy.with_count(8)
        assert bigger.count == 8
        assert bigger.seed == 5

    def test_invalid_inputs(self):
        """Test rejection of a non-positive count and an inverted box."""
        with pytest.raises(ValueError):
            SamplingStrategy(count=0)
        with pytest.raises(ValueError):
            SamplingStrategy(count=3).generate_points([(1.0, -1.0)])

    def test_strategy_is_immutable(self):
        """Test that strategies are frozen."""
        strategy = SamplingStrategy()
        with pytest.raises(AttributeError):
            strategy.count = 5
