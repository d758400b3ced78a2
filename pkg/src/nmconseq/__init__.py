"""Matrix consequence, restricted (nonmonotonic) consequence and their laws."""

from .engine import (
    CN,
    R,
    RSTAR,
    Query,
    Verdict,
    adopts,
    cn_consequence,
    decide,
    r_consequence,
    r_consequence_direct,
)
from .essential import (
    c_instance,
    essential_variables,
    finitary_core,
    is_constant,
    is_essential,
    rstar_consequence,
    rstar_consequence_direct,
)
from .formula import App, Const, Var, parse_formula, to_text, variables
from .matrix import (
    FiniteMatrix,
    Valuation,
    build_b2,
    build_implicative2,
    build_trivial,
    evaluate,
    load_matrix,
    power_matrix,
    resolve_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "CN", "R", "RSTAR", "Query", "Verdict", "adopts", "cn_consequence", "decide",
    "r_consequence", "r_consequence_direct", "c_instance", "essential_variables",
    "finitary_core", "is_constant", "is_essential", "rstar_consequence",
    "rstar_consequence_direct", "App", "Const", "Var", "parse_formula", "to_text",
    "variables", "FiniteMatrix", "Valuation", "build_b2", "build_implicative2",
    "build_trivial", "evaluate", "load_matrix", "power_matrix", "resolve_matrix",
]
