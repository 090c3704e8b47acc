"""
Deterministic sampling of chart points.

Points come from a scrambled Halton sequence seeded by the caller, so two
runs with the same seed and count visit the same points in the same order.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

Box = Sequence[Tuple[float, float]]


@dataclass(frozen=True)
class SamplingStrategy:
    """Strategy for generating sample points inside a coordinate box."""

    count: int = 100
    seed: int = 42

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("Sample count must be positive")

    def generate_points(self, box: Box) -> np.ndarray:
        """
        Generate ``count`` points in the closed box.

        Degenerate intervals (lo == hi) pin that coordinate.
        """
        dim = len(box)
        if dim == 0:
            return np.zeros((self.count, 0))
        lows = np.array([float(lo) for lo, _ in box])
        highs = np.array([float(hi) for _, hi in box])
        if np.any(highs < lows):
            raise ValueError(f"Invalid sample box {list(box)}")
        unit = qmc.Halton(d=dim, scramble=True, seed=self.seed).random(self.count)
        return lows + unit * (highs - lows)

    def generate_values(self, interval: Tuple[float, float]) -> List[float]:
        """One-dimensional convenience wrapper used for base intervals."""
        return [float(x) for x in self.generate_points([interval])[:, 0]]

    def with_count(self, count: int) -> "SamplingStrategy":
        return SamplingStrategy(count=count, seed=self.seed)
