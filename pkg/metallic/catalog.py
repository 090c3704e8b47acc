"""
Built-in example catalog.

Each entry names a bundled JSON config under ``metallic/examples``. The
catalog order is the listing order of ``examples list``.
"""

from pathlib import Path
from typing import Dict, List, Tuple

from .domain import UnknownExample

EXAMPLES_DIR = Path(__file__).parent / "examples"

CATALOG: Dict[str, Tuple[str, str]] = {
    "dk_r4": (
        "dk_r4.json",
        "Quadratic φ-structure on R^4 with a = 4, b = 5 and its associated metric",
    ),
    "golden_r2": ("golden_r2.json", "Golden structure diag(σ, σ̄) on Euclidean R^2"),
    "metallic_rnm": ("metallic_rnm.json", "Silver structure on R^(2+1)"),
    "warped_exp": ("warped_exp.json", "R x_(e^t) R^2, Kenmotsu with β = -1"),
    "warped_cosh_sphere": (
        "warped_cosh_sphere.json",
        "R x_cosh(t) S^2(2/(1+√5)), Kenmotsu with β = -tanh(t)",
    ),
    "cosymplectic_product": (
        "cosymplectic_product.json",
        "Product R x R^2, the β = 0 case",
    ),
    "line_golden": ("line_golden.json", "Golden-frame line in R^2, totally geodesic"),
    "cone_golden": ("cone_golden.json", "Constant-angle cone in R^3, A = βφ"),
    "plane": ("plane.json", "Plane z = 0 in R^3 with a y/z golden block"),
    "sphere_metallic_shaped": (
        "sphere_metallic_shaped.json",
        "Sphere of radius 1/σ, metallic shaped with A = σI",
    ),
}


def list_examples() -> List[Tuple[str, str]]:
    """(name, description) pairs in catalog order."""
    return [(name, description) for name, (_, description) in CATALOG.items()]


def example_path(name: str) -> Path:
    if name not in CATALOG:
        raise UnknownExample(name)
    return EXAMPLES_DIR / CATALOG[name][0]


def load_example(name: str) -> str:
    """Raw JSON text of a bundled config."""
    return example_path(name).read_text(encoding="utf-8")
