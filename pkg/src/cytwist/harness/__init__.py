from .fit import ResidualModel, Term, fit_residual
from .pipelines import (
    DEFAULT_DS,
    BadPrime,
    CountCache,
    run_catalog,
    verify_geometric_twist,
    verify_modular_twist,
    verify_twist_class,
)
from .report import EXACT, FAIL, FITTED, NO_DATA, Row, VerificationReport

__all__ = [
    "DEFAULT_DS",
    "EXACT",
    "FAIL",
    "FITTED",
    "NO_DATA",
    "BadPrime",
    "CountCache",
    "ResidualModel",
    "Row",
    "Term",
    "VerificationReport",
    "fit_residual",
    "run_catalog",
    "verify_geometric_twist",
    "verify_modular_twist",
    "verify_twist_class",
]
