"""Conversion between expressions and sympy polynomials for elimination.

The only irrationality admitted is r = sqrt(x^2 + y^2), represented by an
auxiliary symbol ``u`` with the side relation u^2 = x^2 + y^2.  Negative
powers (1/x^2, 1/r) are cleared by multiplying through by a monomial, which
only changes the zero set on excluded loci.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp

from ..expr import Expr, NotPolynomial, Sym, normalize, parse
from ..expr.core import Const, Func, Pow, add, mul, power, sqrt
from ..expr.normal import to_poly

RADIUS_SQ = normalize(parse("x^2 + y^2"))
R_EXPR = sqrt(parse("x^2 + y^2"))
SYMBOLS = {name: sp.Symbol(name) for name in ("x", "y", "px", "py", "u")}
U = SYMBOLS["u"]


class NotAlgebraic(NotPolynomial):
    """The expression has irrationalities other than sqrt(x^2 + y^2)."""


def to_sympy(e: Expr, allowed=("x", "y", "px", "py")):
    """Laurent polynomial in ``allowed`` (plus u) as a sympy expression."""
    terms = []
    for mono, c in to_poly(e).terms.items():
        factors = [sp.Rational(c.numerator, c.denominator)]
        for atom, k in mono:
            if isinstance(atom, Sym) and atom.name in allowed:
                factors.append(SYMBOLS[atom.name] ** k)
            elif isinstance(atom, Pow) and atom.base == RADIUS_SQ and atom.exp in (Fraction(1, 2), -1):
                factors.append(U ** (k if atom.exp > 0 else -2 * k))
            else:
                raise NotAlgebraic(f"cannot treat {atom} as a polynomial variable")
        terms.append(sp.Mul(*factors))
    return sp.Add(*terms)


def cleared_poly(e: Expr, gens):
    """Multiply a Laurent expression by the smallest monomial making it polynomial."""
    expr = sp.expand(to_sympy(e, tuple(str(g) for g in gens if g != U)))
    if expr == 0:
        return sp.Poly(0, *gens, domain="QQ")
    shift = {}
    for term in sp.Add.make_args(expr):
        for g, k in term.as_powers_dict().items():
            if g in gens and k < 0:
                shift[g] = max(shift.get(g, 0), -k)
    if shift:
        expr = sp.expand(expr * sp.Mul(*(g ** k for g, k in shift.items())))
    return sp.Poly(expr, *gens, domain="QQ")


def reduce_radius(poly):
    """Reduce modulo u^2 = x^2 + y^2 so that x appears with degree <= 1."""
    if U not in poly.gens or poly.is_zero:
        return poly
    x, y = SYMBOLS["x"], SYMBOLS["y"]
    rel = sp.Poly(x**2 - (U**2 - y**2), *poly.gens, domain="QQ")
    if x not in poly.gens:
        return poly
    _, r = sp.div(poly, rel, x)
    return sp.Poly(r.as_expr(), *poly.gens, domain="QQ")


def from_sympy(expr) -> Expr:
    """Sympy polynomial in x, y, px, py, u back to an expression (u = sqrt(x^2+y^2))."""
    poly = sp.Poly(sp.expand(expr), *[s for s in SYMBOLS.values()])
    names = list(SYMBOLS)
    terms = []
    for exps, c in poly.terms():
        c = sp.Rational(c)
        factors = [Const(Fraction(int(c.p), int(c.q)))]
        for name, k in zip(names, exps):
            if not k:
                continue
            factors.append(power(R_EXPR, k) if name == "u" else power(Sym(name), k))
        terms.append(mul(*factors))
    return add(*terms)


def squarefree_factors(poly) -> list:
    """Distinct non-constant irreducible factors over Q (multiplicities dropped)."""
    if poly.is_zero:
        return []
    _, facs = sp.factor_list(poly)
    out = []
    for f, _mult in facs:
        f = sp.Poly(f, *poly.gens)
        if f.total_degree() > 0:
            out.append(f)
    return out


def monic_integer(poly):
    """Scale a factor to a primitive integer polynomial with positive leading coefficient."""
    _, p = poly.clear_denoms()
    p = p.primitive()[1]
    if p.LC() < 0:
        p = -p
    return p


def expression_factors(e: Expr):
    """Squarefree factors of an (x, y[, u]) expression, as (sympy Poly, Expr) pairs.

    Returns None when the expression is outside the algebraic fragment.
    """
    try:
        gens = [SYMBOLS["x"], SYMBOLS["y"]]
        probe = to_sympy(e, ("x", "y"))
    except NotAlgebraic:
        return None
    if probe.has(U):
        gens.append(U)
    poly = reduce_radius(cleared_poly(e, gens))
    return [(f, normalize(from_sympy(monic_integer(f).as_expr()))) for f in squarefree_factors(poly)]


def squarefree_part(e: Expr) -> Expr:
    """Product of the distinct irreducible factors of e (same real zero set off exclusions)."""
    facs = expression_factors(e)
    if facs is None or not facs:
        return e
    return normalize(mul(*(f for _, f in facs)))
