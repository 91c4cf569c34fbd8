"""Nikodym and Kakeya sets over finite fields: construction, transformation,
exact verification at desk scale, and Monte Carlo estimates of the heuristic
quantities that drive the constructions."""

__version__ = "0.1.0"

from .constructions import (
    ConstructionParams,
    known_bounds,
    nikodym_to_kakeya,
    one_miss_lines,
    parabola_core,
    parabola_nikodym,
    product_nikodym,
    quadric_nikodym,
    random_nikodym,
)
from .errors import NikodymError
from .field import build_field, validate_parabola_field
from .geometry import Direction, DirectionSet, GeomSpec, PointSet, build_geometry, product_set
from .setfile import load_set, save_set
from .verification import (
    brute_force_minimum,
    extract_witnesses,
    kakeya_check,
    nikodym_check,
)

__all__ = [
    "ConstructionParams",
    "Direction",
    "DirectionSet",
    "GeomSpec",
    "NikodymError",
    "PointSet",
    "__version__",
    "brute_force_minimum",
    "build_field",
    "build_geometry",
    "extract_witnesses",
    "kakeya_check",
    "known_bounds",
    "load_set",
    "nikodym_check",
    "nikodym_to_kakeya",
    "one_miss_lines",
    "parabola_core",
    "parabola_nikodym",
    "product_nikodym",
    "product_set",
    "quadric_nikodym",
    "random_nikodym",
    "save_set",
    "validate_parabola_field",
]
