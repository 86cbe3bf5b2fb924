"""Exact symbolic expression kernel."""

from .calculus import differentiate, gradient
from .core import (
    COORDS,
    MOMENTA,
    PHASE_VARS,
    Add,
    Const,
    Expr,
    Func,
    Mul,
    Pow,
    Sym,
    cbrt,
    cos,
    is_polynomial_system,
    sin,
    sqrt,
    substitute,
    symbols,
)
from .errors import (
    DivisionByZero,
    EvaluationError,
    EvenRootOfNegative,
    ExprError,
    NotPolynomial,
    ParseError,
    SamplingError,
    UnboundSymbol,
    UnknownSymbolError,
)
from .evaluate import PhasePoint, evaluate
from .normal import as_polynomial, is_zero, normalize, total_degree
from .parser import parse
from .printer import to_string
from .identity import (
    Constraint,
    IdentityResult,
    PointSampler,
    derive_seed,
    equal_identically,
    in_domain,
    parse_domain,
)
from .codegen import lambdify
