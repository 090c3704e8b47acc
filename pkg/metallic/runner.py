import json
import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple, TypeVar

import numpy as np
from pydantic import ValidationError

from .config import settings
from .domain import (
    ConfigError,
    ExpressionError,
    GeometryError,
    InvalidParameters,
    VerificationReport,
    failed_check,
)
from .exprlang import Expr, parse
from .hypersurface import (
    Hypersurface,
    curvature_xi_check,
    kenmotsu_hypersurface_check,
    killing_check,
    verify_induced_structure,
    verify_metallic_shaped,
    verify_shape_operator,
    verify_structure_equations,
)
from .models import ChartConfig, MetallicConfig, VerificationConfig
from .sampling import SamplingStrategy
from .structures import (
    AssociatedMetricConstants,
    MetallicStructure,
    QuadraticPhiStructure,
    verify_associated_metric,
    verify_integrable,
    verify_locally_metallic,
    verify_metallic,
    verify_product_roundtrip,
    verify_quadratic_phi,
    verify_spectral,
)
from .tensor import (
    ChartedManifold,
    OneForm,
    TensorField11,
    VectorField,
    verify_levi_civita,
)
from .warped import (
    InducedQuadraticStructure,
    WarpedProduct,
    induce_phi,
    nijenhuis_phi_check,
    theorem_qc_check,
    verify_az_formulas,
    verify_kenmotsu,
    verify_lift_identity,
    warped_metric,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


def parse_config(text: str, source: str = "<config>") -> VerificationConfig:
    """Decode and validate a JSON config; every failure becomes a ConfigError."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", source
        ) from e
    try:
        return VerificationConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        raise ConfigError(first["msg"], path or source) from e


def load_config(path) -> VerificationConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror or e}", str(path)) from e
    return parse_config(text, source=str(path))


def _first(*candidates: Optional[T]) -> T:
    for candidate in candidates:
        if candidate is not None:
            return candidate
    raise ValueError("no value supplied")


def _parse_at(text: str, coords: Sequence[str], path: str) -> Expr:
    try:
        return parse(text, coords)
    except ExpressionError as e:
        raise ConfigError(str(e), path) from e


def _parse_rows(
    rows: Sequence[Sequence[str]], coords: Sequence[str], path: str
) -> Tuple[Tuple[Expr, ...], ...]:
    return tuple(
        tuple(
            _parse_at(entry, coords, f"{path}[{i}][{j}]")
            for j, entry in enumerate(row)
        )
        for i, row in enumerate(rows)
    )


def _parse_entries(
    entries: Sequence[str], coords: Sequence[str], path: str
) -> Tuple[Expr, ...]:
    return tuple(
        _parse_at(entry, coords, f"{path}[{i}]") for i, entry in enumerate(entries)
    )


def build_chart(chart: ChartConfig, path: str) -> ChartedManifold:
    try:
        if chart.metric is None:
            return ChartedManifold.euclidean(chart.coords, chart.sample_box)
        matrix = _parse_rows(chart.metric, chart.coords, f"{path}.metric")
        return ChartedManifold.from_matrix(chart.coords, chart.sample_box, matrix)
    except InvalidParameters as e:
        raise ConfigError(str(e), path) from e


def build_metallic(
    section: MetallicConfig, coords: Sequence[str], path: str
) -> MetallicStructure:
    rows = _parse_rows(section.J, coords, f"{path}.J")
    try:
        return MetallicStructure(p=section.p, q=section.q, J=TensorField11(rows))
    except InvalidParameters as e:
        raise ConfigError(str(e), path) from e


class VerificationRunner:
    """
    Turns a validated config into domain objects and runs its checks.

    Run settings resolve as: explicit argument, then the config file, then
    the environment defaults in ``settings``. Each check runs on its own
    sample set, drawn from the box of the chart it lives on, and a check
    whose precondition raises is reported as failed without stopping the
    remaining checks.
    """

    def __init__(
        self,
        config: VerificationConfig,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
        tol: Optional[float] = None,
    ):
        self.config = config
        self.samples = _first(samples, config.samples, settings.samples)
        self.seed = _first(seed, config.seed, settings.seed)
        self.tol = _first(tol, config.tol, settings.tol)
        self.strategy = SamplingStrategy(count=self.samples, seed=self.seed)
        self._induced: Optional[InducedQuadraticStructure] = None
        self._build()
        self._dispatch: Dict[str, Callable[[float], VerificationReport]] = {
            "levi_civita": self._levi_civita,
            "metallic": lambda tol: self._on_metallic(verify_metallic, tol),
            "locally_metallic": lambda tol: self._on_metallic(
                verify_locally_metallic, tol
            ),
            "integrable": lambda tol: self._on_metallic(verify_integrable, tol),
            "product_roundtrip": lambda tol: self._on_metallic(
                verify_product_roundtrip, tol
            ),
            "quadratic_phi": self._quadratic_phi,
            "spectral": self._spectral,
            "associated_metric": self._associated_metric,
            "az": lambda tol: verify_az_formulas(
                self._warped_or_fail(), self._warped_points(), tol
            ),
            "induced_phi": self._induced_phi,
            "lift_identity": lambda tol: verify_lift_identity(
                self._warped_or_fail(), self._warped_points(), tol
            ),
            "qc": self._qc,
            "kenmotsu": self._kenmotsu,
            "nijenhuis_phi": self._nijenhuis_phi,
            "shape_operator": lambda tol: self._on_hypersurface(
                verify_shape_operator, tol
            ),
            "hypersurface_structure": lambda tol: self._on_hypersurface(
                verify_induced_structure, tol
            ),
            "structure_equations": lambda tol: self._on_hypersurface(
                verify_structure_equations, tol
            ),
            "killing": lambda tol: self._on_hypersurface(killing_check, tol),
            "kenmotsu_hypersurface": self._kenmotsu_hypersurface,
            "curvature_xi": lambda tol: self._on_hypersurface(curvature_xi_check, tol),
            "metallic_shaped": lambda tol: self._on_hypersurface(
                verify_metallic_shaped, tol
            ),
        }

    def _build(self) -> None:
        """Parse every expression up front so config errors surface before any check."""
        cfg = self.config
        self.manifold: Optional[ChartedManifold] = None
        self.metallic: Optional[MetallicStructure] = None
        self.quadratic: Optional[QuadraticPhiStructure] = None
        self.constants: Optional[AssociatedMetricConstants] = None
        self.warped: Optional[WarpedProduct] = None
        self.expected_beta: Optional[Expr] = None
        self.hypersurface: Optional[Hypersurface] = None
        self.hypersurface_beta: Optional[Expr] = None

        if cfg.manifold is not None:
            self.manifold = build_chart(cfg.manifold, "manifold")
            coords = self.manifold.coords
            if cfg.metallic is not None:
                if len(cfg.metallic.J) != len(coords):
                    raise ConfigError("J size differs from the chart", "metallic.J")
                self.metallic = build_metallic(cfg.metallic, coords, "metallic")
            if cfg.quadratic is not None:
                self._build_quadratic(coords)

        if cfg.warped is not None:
            self._build_warped()

        if cfg.hypersurface is not None:
            self._build_hypersurface()

    def _build_quadratic(self, coords: Sequence[str]) -> None:
        section = self.config.quadratic
        assert section is not None
        if len(section.phi) != len(coords):
            raise ConfigError("phi size differs from the chart", "quadratic.phi")
        try:
            self.quadratic = QuadraticPhiStructure(
                a=section.a,
                b=section.b,
                phi=TensorField11(_parse_rows(section.phi, coords, "quadratic.phi")),
                eta=OneForm(_parse_entries(section.eta, coords, "quadratic.eta")),
                xi=VectorField(_parse_entries(section.xi, coords, "quadratic.xi")),
            )
        except InvalidParameters as e:
            raise ConfigError(str(e), "quadratic") from e
        if section.associated_metric is not None:
            path = "quadratic.associated_metric"
            try:
                constants = AssociatedMetricConstants(
                    **section.associated_metric.model_dump()
                )
                constants.validate_for(self.quadratic)
            except InvalidParameters as e:
                raise ConfigError(str(e), path) from e
            self.constants = constants

    def _build_warped(self) -> None:
        section = self.config.warped
        assert section is not None
        fiber = build_chart(section.fiber, "warped.fiber")
        structure = None
        if section.structure is not None:
            if len(section.structure.J) != fiber.dim:
                raise ConfigError("J size differs from the fiber", "warped.structure.J")
            structure = build_metallic(
                section.structure, fiber.coords, "warped.structure"
            )
        base_coord = section.base_coord
        try:
            self.warped = WarpedProduct(
                fiber=fiber,
                warping=_parse_at(section.warping, [base_coord], "warped.warping"),
                base_interval=_first(section.base_interval, settings.base_interval),
                structure=structure,
                base_coord=base_coord,
            )
        except InvalidParameters as e:
            raise ConfigError(str(e), "warped") from e
        if section.expected_beta is not None:
            self.expected_beta = _parse_at(
                section.expected_beta, self.warped.coords, "warped.expected_beta"
            )

    def _build_hypersurface(self) -> None:
        section = self.config.hypersurface
        assert section is not None
        if self.manifold is None or self.metallic is None:
            raise ConfigError(
                "a hypersurface needs 'manifold' and 'metallic' sections",
                "hypersurface",
            )
        try:
            self.hypersurface = Hypersurface(
                ambient=self.manifold,
                structure=self.metallic,
                params=tuple(section.params),
                param_box=tuple((lo, hi) for lo, hi in section.param_box),
                embedding=_parse_entries(
                    section.embedding, section.params, "hypersurface.embedding"
                ),
                normal_orientation=section.normal_orientation,
            )
        except InvalidParameters as e:
            raise ConfigError(str(e), "hypersurface") from e
        if section.beta is not None:
            self.hypersurface_beta = _parse_at(
                section.beta, section.params, "hypersurface.beta"
            )

    def tolerance(self, check: str) -> float:
        return self.config.tolerances.get(check, self.tol)

    def _points(self, box) -> np.ndarray:
        return self.strategy.generate_points(box)

    def _manifold_or_fail(self) -> ChartedManifold:
        if self.manifold is None:
            raise ConfigError("no manifold section", "manifold")
        return self.manifold

    def _warped_or_fail(self) -> WarpedProduct:
        if self.warped is None:
            raise ConfigError("no warped section", "warped")
        return self.warped

    def _warped_points(self) -> np.ndarray:
        return self._points(self._warped_or_fail().sample_box)

    def _induced_structure(self) -> InducedQuadraticStructure:
        if self._induced is None:
            self._induced = induce_phi(self._warped_or_fail())
        return self._induced

    def _levi_civita(self, tol: float) -> VerificationReport:
        floor = settings.positive_definite_floor
        if self.manifold is not None:
            m = self.manifold
        else:
            m = warped_metric(self._warped_or_fail())
        return verify_levi_civita(m, self._points(m.sample_box), tol, floor)

    def _on_metallic(self, check, tol: float) -> VerificationReport:
        m = self._manifold_or_fail()
        if self.metallic is None:
            raise ConfigError("no metallic section", "metallic")
        return check(m, self.metallic, self._points(m.sample_box), tol)

    def _quadratic_or_fail(self) -> QuadraticPhiStructure:
        if self.quadratic is None:
            raise ConfigError("no quadratic section", "quadratic")
        return self.quadratic

    def _quadratic_phi(self, tol: float) -> VerificationReport:
        m = self._manifold_or_fail()
        section = self.config.quadratic
        return verify_quadratic_phi(
            m,
            self._quadratic_or_fail(),
            self._points(m.sample_box),
            tol,
            metric_checks=bool(section and section.metric_checks),
            rank_threshold=settings.rank_threshold,
        )

    def _spectral(self, tol: float) -> VerificationReport:
        m = self._manifold_or_fail()
        return verify_spectral(
            self._quadratic_or_fail(), self._points(m.sample_box), tol
        )

    def _associated_metric(self, tol: float) -> VerificationReport:
        m = self._manifold_or_fail()
        if self.constants is None:
            raise ConfigError("no associated metric constants", "quadratic")
        return verify_associated_metric(
            m,
            self._quadratic_or_fail(),
            self.constants,
            self._points(m.sample_box),
            tol,
            settings.positive_definite_floor,
        )

    def _induced_phi(self, tol: float) -> VerificationReport:
        induced = self._induced_structure()
        return verify_quadratic_phi(
            induced.manifold,
            induced.structure,
            self._warped_points(),
            tol,
            metric_checks=True,
            rank_threshold=settings.rank_threshold,
        )

    def _qc(self, tol: float) -> VerificationReport:
        return theorem_qc_check(
            self._warped_or_fail(), self._warped_points(), tol, self.expected_beta
        )

    def _kenmotsu(self, tol: float) -> VerificationReport:
        wp = self._warped_or_fail()
        induced = self._induced_structure()
        beta = self.expected_beta
        if beta is None:
            beta = wp.kenmotsu_beta
        return verify_kenmotsu(
            induced.manifold, induced.structure, beta, self._warped_points(), tol
        )

    def _nijenhuis_phi(self, tol: float) -> VerificationReport:
        if self.warped is not None:
            induced = self._induced_structure()
            return nijenhuis_phi_check(
                induced.manifold, induced.structure, self._warped_points(), tol
            )
        m = self._manifold_or_fail()
        return nijenhuis_phi_check(
            m, self._quadratic_or_fail(), self._points(m.sample_box), tol
        )

    def _hypersurface_or_fail(self) -> Hypersurface:
        if self.hypersurface is None:
            raise ConfigError("no hypersurface section", "hypersurface")
        return self.hypersurface

    def _on_hypersurface(self, check, tol: float) -> VerificationReport:
        h = self._hypersurface_or_fail()
        return check(h, self._points(h.param_box), tol)

    def _kenmotsu_hypersurface(self, tol: float) -> VerificationReport:
        h = self._hypersurface_or_fail()
        return kenmotsu_hypersurface_check(
            h, self._points(h.param_box), tol, self.hypersurface_beta
        )

    def run_check(self, name: str) -> VerificationReport:
        """Run one named check; its entries come back namespaced as ``name.entry``."""
        tol = self.tolerance(name)
        logger.info(f"🔎 Running {name} on {self.samples} samples (tol {tol:g})")
        try:
            report = self._dispatch[name](tol)
        except (GeometryError, np.linalg.LinAlgError) as e:
            logger.warning(f"⚠️ {name} could not be evaluated: {e}")
            return VerificationReport(checks=[failed_check(name, tol, str(e))])
        report = report.prefixed(name)
        if report.passed:
            logger.info(f"✅ {name}: worst residual {report.worst_residual:.3e}")
        else:
            failed = ", ".join(c.name for c in report.failed_checks)
            logger.warning(f"❌ {name}: failed {failed}")
        return report

    def run(self) -> VerificationReport:
        """Run the configured checks in order and assemble one report."""
        report = VerificationReport(
            notes=list(self.config.notes), title=self.config.title
        )
        for name in self.config.checks:
            report = report.merged(self.run_check(name))
        verdict = "PASS" if report.passed else "FAIL"
        logger.info(
            f"📊 {len(report.checks)} results, worst residual "
            f"{report.worst_residual:.3e}: {verdict}"
        )
        return report
