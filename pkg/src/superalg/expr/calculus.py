from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .core import (
    ONE,
    ZERO,
    Add,
    Const,
    Expr,
    Func,
    Mul,
    Pow,
    Sym,
    add,
    cos,
    mul,
    neg,
    power,
    sin,
)


def differentiate(e: Expr, var) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``var``."""
    name = var.name if isinstance(var, Sym) else str(var)
    return _diff(e, name)


@lru_cache(maxsize=200_000)
def _diff(e: Expr, v: str) -> Expr:
    if v not in e.free_symbols():
        return ZERO
    if isinstance(e, Sym):
        return ONE
    if isinstance(e, Add):
        return add(*(_diff(t, v) for t in e.terms))
    if isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff(f, v)
            if df == ZERO:
                continue
            parts.append(mul(*fs[:i], df, *fs[i + 1 :]))
        return add(*parts)
    if isinstance(e, Pow):
        db = _diff(e.base, v)
        return mul(Const(e.exp), power(e.base, e.exp - 1), db)
    if isinstance(e, Func):
        da = _diff(e.arg, v)
        a = e.arg
        if e.name == "sin":
            return mul(cos(a), da)
        if e.name == "cos":
            return neg(mul(sin(a), da))
        if e.name == "sqrt":
            return mul(Const(Fraction(1, 2)), da, power(e, -1))
        if e.name == "cbrt":
            return mul(Const(Fraction(1, 3)), da, power(e, -2))
    raise TypeError(f"cannot differentiate {e!r}")


def gradient(e: Expr, variables) -> tuple:
    return tuple(differentiate(e, v) for v in variables)
