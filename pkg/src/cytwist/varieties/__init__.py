from .catalog import CATALOG, CatalogEntry, catalog_get, elliptic_curve, families
from .core import (
    CoordinateChange,
    InvolutionCheck,
    InvolutionError,
    InvolutionSpec,
    PencilFiberProductSpec,
    TwistFamily,
    VarietySpec,
    check_coordinate_change,
    evaluate_mod_p,
    involution_check,
    specialize_twist,
)
from .deffile import DefinitionError, load_definitions, parse_definitions
from .polynomial import Poly

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "CoordinateChange",
    "DefinitionError",
    "InvolutionCheck",
    "InvolutionError",
    "InvolutionSpec",
    "PencilFiberProductSpec",
    "Poly",
    "TwistFamily",
    "VarietySpec",
    "catalog_get",
    "check_coordinate_change",
    "elliptic_curve",
    "evaluate_mod_p",
    "families",
    "involution_check",
    "load_definitions",
    "parse_definitions",
    "specialize_twist",
]
