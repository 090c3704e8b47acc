"""
Domain objects for the verification harness.

This module keeps the result types and the exception hierarchy in one place
so that the geometry modules, the runner and the CLI share a single
vocabulary. Results are immutable; a report is assembled from check results
in a fixed order so its serialization is deterministic.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np


class GeometryError(Exception):
    """Base exception for everything raised by the harness."""

    pass


class ExpressionError(GeometryError):
    """Base exception for expression parsing and evaluation."""

    pass


class ExpressionSyntaxError(ExpressionError):
    """Raised when an expression string is malformed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariable(ExpressionError):
    """Raised when an expression references a name outside its chart."""

    def __init__(self, name: str):
        super().__init__(f"Unknown variable '{name}'")
        self.name = name


class DomainError(ExpressionError):
    """Raised when an expression is evaluated outside its domain."""

    pass


class SingularMetric(GeometryError):
    """Raised when the metric cannot be inverted at a point."""

    pass


class InvalidParameters(GeometryError):
    """Raised when structure constants violate their constraints."""

    pass


class ComplexSpectrum(GeometryError):
    """Raised when a²+4b < 0 so the spectral projectors are not real."""

    pass


class NonPositiveWarping(GeometryError):
    """Raised when a warping function is not positive on its base interval."""

    pass


class MissingFiberStructure(GeometryError):
    """Raised when a warped product has no metallic structure on its fiber."""

    pass


class FiberNotLocallyMetallic(GeometryError):
    """Raised when the fiber structure is not parallel."""

    def __init__(self, residual: float):
        super().__init__(
            f"Fiber structure is not parallel: max residual {residual:.3e}"
        )
        self.residual = residual


class DegenerateImmersion(GeometryError):
    """Raised when an embedding loses rank."""

    pass


class FrameConditionViolated(GeometryError):
    """Raised when the unit normal does not satisfy Jν = qξ + pν."""

    def __init__(self, measured_p: float, measured_q: float, p: int, q: int):
        super().__init__(
            f"Frame condition violated: g(Jν,ν) = {measured_p:.6g} (expected {p}), "
            f"|tan(Jν)|² = {measured_q:.6g} (expected {q})"
        )
        self.measured_p = measured_p
        self.measured_q = measured_q


class QNotOne(GeometryError):
    """Raised when an induced hypersurface structure needs q = 1."""

    def __init__(self, q: int):
        super().__init__(f"Induced quadratic structures require q = 1, got q = {q}")
        self.q = q


class NotKenmotsu(GeometryError):
    """Raised when the Kenmotsu derivative identity fails on a hypersurface."""

    def __init__(self, residual: float):
        super().__init__(f"Kenmotsu identity fails: max residual {residual:.3e}")
        self.residual = residual


class UnknownExample(GeometryError):
    """Raised when a catalog example name is not bundled."""

    def __init__(self, name: str):
        super().__init__(f"Unknown example '{name}'")
        self.name = name


class ConfigError(GeometryError):
    """Raised when a verification config cannot be turned into domain objects."""

    def __init__(self, message: str, field_path: str = ""):
        prefix = f"{field_path}: " if field_path else ""
        super().__init__(f"{prefix}{message}")
        self.field_path = field_path


@dataclass(frozen=True)
class CheckResult:
    """Immutable residual statistics of one identity over the sampled points."""

    name: str
    samples: int
    max_residual: float
    mean_residual: float
    tol: float
    worst_point: Tuple[float, ...] = ()
    notes: Tuple[str, ...] = ()
    enforced: bool = True

    def __post_init__(self):
        """Validate check data after initialization."""
        if not self.name:
            raise ValueError("Check name is required")
        if self.samples < 0:
            raise ValueError("Sample count cannot be negative")

    @property
    def passed(self) -> bool:
        """Whether the worst residual stays within tolerance."""
        return bool(self.max_residual <= self.tol)

    def with_notes(self, *notes: str) -> "CheckResult":
        return CheckResult(
            name=self.name,
            samples=self.samples,
            max_residual=self.max_residual,
            mean_residual=self.mean_residual,
            tol=self.tol,
            worst_point=self.worst_point,
            notes=self.notes + tuple(notes),
            enforced=self.enforced,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON data; non-finite residuals become None."""
        return {
            "name": self.name,
            "samples": self.samples,
            "max_residual": _finite_or_none(self.max_residual),
            "mean_residual": _finite_or_none(self.mean_residual),
            "tol": self.tol,
            "worst_point": list(self.worst_point),
            "passed": self.passed,
            "enforced": self.enforced,
            "notes": list(self.notes),
        }


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def failed_check(name: str, tol: float, message: str) -> CheckResult:
    """A check whose precondition raised before any residual was measured."""
    return CheckResult(
        name=name,
        samples=0,
        max_residual=float("inf"),
        mean_residual=float("inf"),
        tol=tol,
        notes=(message,),
    )


def informational_check(name: str, note: str) -> CheckResult:
    """A zero-residual entry that only carries a note."""
    return CheckResult(
        name=name,
        samples=0,
        max_residual=0.0,
        mean_residual=0.0,
        tol=0.0,
        notes=(note,),
        enforced=False,
    )


@dataclass(frozen=True)
class VerificationReport:
    """Immutable, ordered collection of check results."""

    checks: List[CheckResult] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    title: Optional[str] = None

    @property
    def passed(self) -> bool:
        """Overall verdict: every enforced check passes."""
        return all(check.passed for check in self.checks if check.enforced)

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if c.enforced and not c.passed]

    @property
    def worst_residual(self) -> float:
        """Largest enforced residual, 0.0 for an empty report."""
        enforced = [c.max_residual for c in self.checks if c.enforced]
        return max(enforced) if enforced else 0.0

    def check(self, name: str) -> CheckResult:
        """Look up a check by name."""
        for entry in self.checks:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(
            checks=self.checks + other.checks,
            notes=self.notes + other.notes,
            title=self.title or other.title,
        )

    def prefixed(self, prefix: str) -> "VerificationReport":
        """Namespace every check name, e.g. ``induced_phi.quadratic_identity``."""
        renamed = [
            CheckResult(
                name=f"{prefix}.{c.name}",
                samples=c.samples,
                max_residual=c.max_residual,
                mean_residual=c.mean_residual,
                tol=c.tol,
                worst_point=c.worst_point,
                notes=c.notes,
                enforced=c.enforced,
            )
            for c in self.checks
        ]
        return VerificationReport(checks=renamed, notes=self.notes, title=self.title)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
        }


class ResidualAccumulator:
    """
    Collects per-point residuals for one identity.

    The worst point is the first point that reaches the maximum, so the
    result only depends on the sample order.
    """

    def __init__(self, name: str, tol: float, enforced: bool = True):
        self.name = name
        self.tol = tol
        self.enforced = enforced
        self._residuals: List[float] = []
        self._worst: Tuple[float, ...] = ()
        self._max = 0.0
        self._notes: List[str] = []

    def add(self, point: Sequence[float], residual: float) -> None:
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float("inf")
        if not self._residuals or residual > self._max:
            self._max = residual
            self._worst = tuple(float(x) for x in point)
        self._residuals.append(residual)

    def note(self, message: str) -> None:
        if message not in self._notes:
            self._notes.append(message)

    @property
    def max_residual(self) -> float:
        return self._max

    def result(self) -> CheckResult:
        count = len(self._residuals)
        mean = float(np.mean(self._residuals)) if count else 0.0
        return CheckResult(
            name=self.name,
            samples=count,
            max_residual=self._max,
            mean_residual=mean,
            tol=self.tol,
            worst_point=self._worst,
            notes=tuple(self._notes),
            enforced=self.enforced,
        )


def max_abs(values: Any) -> float:
    """Infinity norm of an array-like residual, 0.0 when empty."""
    array = np.asarray(values, dtype=float)
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))
