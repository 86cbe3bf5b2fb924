"""Polynomial algebras of integrals for two-dimensional superintegrable systems.

Subpackages and modules:

- ``expr``: exact expression kernel (parser, normal form, calculus, identity testing)
- ``poisson``: canonical Poisson bracket
- ``catalog``: the built-in systems and their expected algebra data
- ``algebra``: derivation of k^2, G(H, L) and {A, B}
- ``trajectory``: implicit trajectory equations, elimination, curve tracing
- ``dynamics``: numerical integration of Hamilton's equations
- ``cli``: the ``superalg`` command
"""

__version__ = "0.1.0"

from .algebra import AlgebraReport, analyze_system
from .catalog import SystemDef, builtin_systems, instantiate, load_system
from .dynamics import constants_of, hamilton_rhs, integrate
from .expr import parse
from .poisson import is_integral, poisson_bracket
from .trajectory import builtin_trajectory_equation, eliminate_momenta, trace_curves

__all__ = [
    "AlgebraReport",
    "SystemDef",
    "analyze_system",
    "builtin_systems",
    "builtin_trajectory_equation",
    "constants_of",
    "eliminate_momenta",
    "hamilton_rhs",
    "instantiate",
    "integrate",
    "is_integral",
    "load_system",
    "parse",
    "poisson_bracket",
    "trace_curves",
]
