"""Configuration-space trajectories: implicit equations, elimination, tracing."""

from .algebraic import NotAlgebraic, squarefree_part
from .eliminate import (
    DegenerateResultant,
    Elimination,
    EliminationError,
    NotEliminable,
    bareiss_determinant,
    eliminate_momenta,
    resultant,
    sylvester_matrix,
)
from .equations import (
    EQUATION_DOMAINS,
    EQUATION_PARAMETERS,
    TRAJECTORY_EQUATIONS,
    UnknownEquation,
    builtin_trajectory_equation,
    equation_template,
)
from .export import curves_to_csv, curves_to_svg
from .trace import CurveSet, EmptyCurve, component_labels, components, trace_curves, zero_crossings

__all__ = [
    "CurveSet",
    "DegenerateResultant",
    "EQUATION_DOMAINS",
    "EQUATION_PARAMETERS",
    "Elimination",
    "EliminationError",
    "EmptyCurve",
    "NotAlgebraic",
    "NotEliminable",
    "TRAJECTORY_EQUATIONS",
    "UnknownEquation",
    "bareiss_determinant",
    "builtin_trajectory_equation",
    "component_labels",
    "components",
    "curves_to_csv",
    "curves_to_svg",
    "eliminate_momenta",
    "equation_template",
    "resultant",
    "squarefree_part",
    "sylvester_matrix",
    "trace_curves",
    "zero_crossings",
]
