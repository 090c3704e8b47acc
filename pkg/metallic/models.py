"""
Configuration schema for verification runs.

These Pydantic models describe the JSON documents accepted by
``metallic verify`` and bundled in the example catalog. They validate
shapes, ranges and check names; expression strings are parsed later, when
the runner turns a config into domain objects, so that parse errors can
carry both the field path and the offset inside the expression.
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ExprText = Union[str, float, int]

STRUCTURE_CHECKS = (
    "levi_civita",
    "metallic",
    "locally_metallic",
    "integrable",
    "product_roundtrip",
    "quadratic_phi",
    "spectral",
    "associated_metric",
)
WARPED_CHECKS = (
    "az",
    "induced_phi",
    "lift_identity",
    "qc",
    "kenmotsu",
    "nijenhuis_phi",
)
HYPERSURFACE_CHECKS = (
    "shape_operator",
    "hypersurface_structure",
    "structure_equations",
    "killing",
    "kenmotsu_hypersurface",
    "curvature_xi",
    "metallic_shaped",
)
KNOWN_CHECKS = STRUCTURE_CHECKS + WARPED_CHECKS + HYPERSURFACE_CHECKS


def _as_text(value: ExprText) -> str:
    if isinstance(value, bool):
        raise ValueError("booleans are not expressions")
    if isinstance(value, (int, float)):
        return repr(value)
    return value


def _square(rows: List[List[str]], label: str) -> List[List[str]]:
    n = len(rows)
    if n == 0:
        raise ValueError(f"{label} must not be empty")
    for row in rows:
        if len(row) != n:
            raise ValueError(f"{label} must be square, got a row of length {len(row)}")
    return rows


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ChartConfig(_Strict):
    """A single chart; the metric defaults to the Euclidean one."""

    coords: List[str] = Field(..., min_length=1)
    sample_box: List[Tuple[float, float]]
    metric: Optional[List[List[str]]] = None

    @field_validator("metric", mode="before")
    @classmethod
    def stringify_metric(cls, v):
        if v is None:
            return v
        return [[_as_text(entry) for entry in row] for row in v]

    @field_validator("sample_box")
    @classmethod
    def check_box(cls, v):
        for lo, hi in v:
            if not lo < hi:
                raise ValueError(f"sample interval [{lo}, {hi}] is empty")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("coordinate names must be distinct")
        if len(self.sample_box) != len(self.coords):
            raise ValueError("sample_box needs one interval per coordinate")
        if self.metric is not None:
            _square(self.metric, "metric")
            if len(self.metric) != len(self.coords):
                raise ValueError("metric size differs from the number of coordinates")
        return self


class MetallicConfig(_Strict):
    """J with J² = pJ + qI, components J^i_j as expressions."""

    p: int = Field(..., ge=1)
    q: int = Field(..., ge=1)
    J: List[List[str]]

    @field_validator("J", mode="before")
    @classmethod
    def stringify(cls, v):
        return [[_as_text(entry) for entry in row] for row in v]

    @field_validator("J")
    @classmethod
    def check_square(cls, v):
        return _square(v, "J")


class AssociatedMetricConfig(_Strict):
    c_alpha: float
    c_beta: float
    c_gamma: float
    c_delta: float


class QuadraticConfig(_Strict):
    """(φ, η, ξ) with φ² = aφ + b(I − η⊗ξ)."""

    a: float
    b: float
    phi: List[List[str]]
    eta: List[str]
    xi: List[str]
    metric_checks: bool = False
    associated_metric: Optional[AssociatedMetricConfig] = None

    @field_validator("phi", mode="before")
    @classmethod
    def stringify_phi(cls, v):
        return [[_as_text(entry) for entry in row] for row in v]

    @field_validator("eta", "xi", mode="before")
    @classmethod
    def stringify_vector(cls, v):
        return [_as_text(entry) for entry in v]

    @field_validator("b")
    @classmethod
    def check_b(cls, v):
        if v == 0:
            raise ValueError("b must be nonzero")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        _square(self.phi, "phi")
        if self.a * self.a + 4 * self.b == 0:
            raise ValueError("a^2 + 4b must be nonzero")
        if not len(self.phi) == len(self.eta) == len(self.xi):
            raise ValueError("phi, eta and xi must have the same dimension")
        return self


class WarpedConfig(_Strict):
    """ℝ ×_f N with an optional metallic structure on the fiber."""

    base_coord: str = "t"
    base_interval: Optional[Tuple[float, float]] = None
    warping: str
    fiber: ChartConfig
    structure: Optional[MetallicConfig] = None
    expected_beta: Optional[str] = None

    @field_validator("warping", "expected_beta", mode="before")
    @classmethod
    def stringify(cls, v):
        return None if v is None else _as_text(v)

    @field_validator("base_interval")
    @classmethod
    def check_interval(cls, v):
        if v is not None and not v[0] < v[1]:
            raise ValueError(f"base interval [{v[0]}, {v[1]}] is empty")
        return v


class HypersurfaceConfig(_Strict):
    """Embedding of a parameter chart into the config's manifold."""

    params: List[str] = Field(..., min_length=1)
    param_box: List[Tuple[float, float]]
    embedding: List[str]
    normal_orientation: int = 1
    beta: Optional[str] = None

    @field_validator("embedding", mode="before")
    @classmethod
    def stringify(cls, v):
        return [_as_text(entry) for entry in v]

    @field_validator("beta", mode="before")
    @classmethod
    def stringify_beta(cls, v):
        return None if v is None else _as_text(v)

    @field_validator("normal_orientation")
    @classmethod
    def check_orientation(cls, v):
        if v not in (1, -1):
            raise ValueError("normal_orientation must be +1 or -1")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        if len(self.param_box) != len(self.params):
            raise ValueError("param_box needs one interval per parameter")
        for lo, hi in self.param_box:
            if not lo < hi:
                raise ValueError(f"parameter interval [{lo}, {hi}] is empty")
        return self


class VerificationConfig(_Strict):
    """
    A verification run: definitions, the checks to run and run settings.

    Run settings left out here fall back to the CLI flags and then to the
    environment defaults.
    """

    title: Optional[str] = None
    checks: List[str] = Field(..., min_length=1)
    samples: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    tol: Optional[float] = Field(None, gt=0)
    format: Optional[Literal["text", "json"]] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    manifold: Optional[ChartConfig] = None
    metallic: Optional[MetallicConfig] = None
    quadratic: Optional[QuadraticConfig] = None
    warped: Optional[WarpedConfig] = None
    hypersurface: Optional[HypersurfaceConfig] = None

    @field_validator("checks")
    @classmethod
    def check_names(cls, v):
        unknown = [name for name in v if name not in KNOWN_CHECKS]
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(unknown)}")
        return v

    @field_validator("tolerances")
    @classmethod
    def check_tolerances(cls, v):
        for name, tol in v.items():
            if name not in KNOWN_CHECKS:
                raise ValueError(f"tolerance for unknown check '{name}'")
            if tol <= 0:
                raise ValueError(f"tolerance for '{name}' must be positive")
        return v

    @model_validator(mode="after")
    def check_sections(self):
        for name in self.checks:
            for section in required_sections(name, self):
                if getattr(self, section) is None:
                    raise ValueError(f"check '{name}' needs a '{section}' section")
        if "associated_metric" in self.checks and self.quadratic is not None:
            if self.quadratic.associated_metric is None:
                raise ValueError("check 'associated_metric' needs constants")
        if self.hypersurface is not None and self.manifold is not None:
            if len(self.hypersurface.embedding) != len(self.manifold.coords):
                raise ValueError("embedding needs one expression per coordinate")
        return self


def required_sections(check: str, config: VerificationConfig) -> Tuple[str, ...]:
    """Config sections a check reads."""
    if check == "levi_civita":
        return () if config.warped is not None else ("manifold",)
    if check in ("metallic", "locally_metallic", "integrable", "product_roundtrip"):
        return ("manifold", "metallic")
    if check in ("quadratic_phi", "spectral"):
        return ("manifold", "quadratic")
    if check == "associated_metric":
        return ("manifold", "quadratic")
    if check == "nijenhuis_phi":
        return () if config.warped is not None else ("manifold", "quadratic")
    if check in WARPED_CHECKS:
        return ("warped",)
    return ("manifold", "metallic", "hypersurface")
