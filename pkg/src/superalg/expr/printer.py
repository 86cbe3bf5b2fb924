"""Render expressions in the same grammar the parser accepts."""

from __future__ import annotations

from fractions import Fraction

from .core import Add, Const, Func, Mul, Pow, Sym

# binding strength: sum < product < power < atom
_SUM, _PROD, _POW, _ATOM = 1, 2, 3, 4


def _frac(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _prec(e) -> int:
    if isinstance(e, Add):
        return _SUM
    if isinstance(e, Mul):
        return _PROD
    if isinstance(e, Const):
        if e.value < 0:
            return _SUM
        return _PROD if e.value.denominator != 1 else _ATOM
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _wrap(e, min_prec: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < min_prec else s


def _exponent(p: Fraction) -> str:
    if p.denominator == 1 and p > 0:
        return str(p.numerator)
    return f"({_frac(p)})"


def _pow_string(base, p: Fraction) -> str:
    # fractional powers print through sqrt/cbrt; the tree still holds power(base, p/q)
    if p.denominator in (2, 3):
        name = "sqrt" if p.denominator == 2 else "cbrt"
        root = f"{name}({to_string(base)})"
        if p.numerator == 1:
            return root
        return f"{root}^{_exponent(Fraction(p.numerator))}"
    return f"{_wrap(base, _ATOM)}^{_exponent(p)}"


def _product(factors) -> str:
    coeff = Fraction(1)
    rest = []
    for f in factors:
        if isinstance(f, Const):
            coeff *= f.value
        else:
            rest.append(f)
    body = "*".join(_wrap(f, _POW) for f in rest)
    if not body:
        return _frac(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    return f"{_frac(coeff)}*{body}"


def to_string(e) -> str:
    if isinstance(e, Const):
        return _frac(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return _pow_string(e.base, e.exp)
    if isinstance(e, Mul):
        return _product(e.factors)
    if isinstance(e, Add):
        out = ""
        for i, t in enumerate(e.terms):
            s = to_string(t) if not isinstance(t, Add) else f"({to_string(t)})"
            if i == 0:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise TypeError(f"not an expression: {e!r}")
