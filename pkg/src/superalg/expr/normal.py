"""Canonical expanded form for Laurent polynomials over opaque atoms.

A normalized expression is a sum of monomials with collected rational
coefficients.  Monomial factors ("atoms") are

* symbols, with any integer exponent;
* root atoms ``b^(1/q)`` over a normalized base, with exponent ``0 < e < q``
  (integer multiples of q are folded back into ``b``);
* inverse atoms ``b^(-1)`` for a normalized multi-term base ``b`` that has
  been made primitive (no monomial content, leading coefficient 1);
* ``sin``/``cos`` of a normalized argument, treated as opaque.

No identities between distinct atoms are used, so ``sin(x)^2 + cos(x)^2``
stays as it is.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import floor

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
    PHASE_VARS,
    add,
    mul,
    power,
)
from .errors import DivisionByZero, NotPolynomial
from .evaluate import exact_root

_SYM_RANK = {name: i for i, name in enumerate(PHASE_VARS)}


@lru_cache(maxsize=None)
def atom_key(atom: Expr):
    if isinstance(atom, Sym):
        return (0, _SYM_RANK.get(atom.name, len(_SYM_RANK)), atom.name)
    return (1, str(atom))


def _is_root(atom) -> bool:
    return isinstance(atom, Pow) and atom.exp > 0


def _is_inverse(atom) -> bool:
    return isinstance(atom, Pow) and atom.exp < 0


class Poly:
    """Sparse map monomial -> Fraction; a monomial is a sorted tuple of (atom, exp)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def atom(cls, a: Expr, exp: int = 1) -> "Poly":
        return _canon_monomial({a: exp}, Fraction(1))

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def copy(self) -> "Poly":
        return Poly(dict(self.terms))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        if not c:
            return Poly()
        return Poly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        if len(self.terms) > len(other.terms):
            a, b = other, self
        else:
            a, b = self, other
        out: dict = {}
        extra = []
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m, special = _mono_product(m1, m2)
                c = c1 * c2
                if special:
                    extra.append(_canon_monomial(m, c))
                    continue
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        res = Poly(out)
        for p in extra:
            res = res + p
        return res

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            return inverse(self) ** (-n)
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def atoms(self) -> set:
        out = set()
        for m in self.terms:
            out.update(a for a, _ in m)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _term_order(t[0]))


def _term_order(mono):
    deg = sum(e for _, e in mono)
    return (-deg, [(atom_key(a), -e) for a, e in mono])


def _mono_product(m1, m2):
    """Merge two monomials. Returns (monomial-or-dict, needs_canonicalization)."""
    if not m1:
        return m2, False
    if not m2:
        return m1, False
    d = dict(m1)
    for a, e in m2:
        v = d.get(a, 0) + e
        if v:
            d[a] = v
        else:
            del d[a]
    if _needs_canon(d):
        return d, True
    return tuple(sorted(d.items(), key=lambda t: atom_key(t[0]))), False


def _needs_canon(d: dict) -> bool:
    bases = set()
    for a, e in d.items():
        if isinstance(a, Pow):
            if a.exp < 0:
                if e < 0:
                    return True
            else:
                if not 0 < e < a.exp.denominator or a.base in bases:
                    return True
                bases.add(a.base)
    return False


def _canon_monomial(d: dict, coeff: Fraction) -> Poly:
    """Fold root/inverse atoms into canonical range, returning coeff * monomial as a Poly."""
    plain = {}
    roots: dict = {}
    powers: dict = {}  # primitive multi-term base -> net integer exponent
    result = Poly.const(coeff)
    for a, e in d.items():
        if e == 0:
            continue
        if _is_root(a):
            roots[a.base] = roots.get(a.base, Fraction(0)) + Fraction(e) * a.exp
        elif _is_inverse(a):
            powers[a.base] = powers.get(a.base, 0) - e
        else:
            plain[a] = plain.get(a, 0) + e
    for base, total in roots.items():
        k = floor(total)
        frac = total - k
        if k:
            bpoly = to_poly(base)
            if bpoly.is_monomial():
                result = result * (bpoly ** k)
            else:
                content, primitive, lead = _split_content(bpoly)
                result = result * (content ** k) * Poly.const(lead ** k)
                prim = export(primitive)
                powers[prim] = powers.get(prim, 0) + k
        if frac:
            r = Pow(base, Fraction(1, frac.denominator))
            plain[r] = plain.get(r, 0) + frac.numerator
    for prim, n in powers.items():
        if n > 0:
            result = result * (to_poly(prim) ** n)
        elif n < 0:
            inv = Pow(prim, -1)
            plain[inv] = plain.get(inv, 0) - n
    mono = tuple(sorted(((a, e) for a, e in plain.items() if e), key=lambda t: atom_key(t[0])))
    return result * Poly({mono: Fraction(1)})


def inverse(p: Poly) -> Poly:
    if p.is_zero():
        raise DivisionByZero("division by zero in normalization")
    if p.is_monomial():
        (m, c), = p.terms.items()
        return _canon_monomial({a: -e for a, e in m}, 1 / c)
    content, primitive, lead = _split_content(p)
    out = Poly({((Pow(export(primitive), -1), 1),): 1 / lead})
    if content.terms != {(): 1}:
        out = out * inverse(content)
    return out


def _split_content(p: Poly):
    """p = content * lead * primitive with content a monomial and primitive monic."""
    monos = list(p.terms)
    common = None
    for m in monos:
        d = dict(m)
        if common is None:
            common = {a: e for a, e in d.items() if not (_is_root(a) or _is_inverse(a))}
        else:
            common = {a: min(e, d[a]) for a, e in common.items() if a in d}
    common = {a: e for a, e in (common or {}).items() if e}
    content = Poly({tuple(sorted(common.items(), key=lambda t: atom_key(t[0]))): Fraction(1)})
    if common:
        shift = {a: -e for a, e in common.items()}
        q = Poly()
        for m, c in p.terms.items():
            d = dict(m)
            for a, e in shift.items():
                d[a] = d.get(a, 0) + e
            q = q + _canon_monomial(d, c)
    else:
        q = p
    lead_mono, lead = q.sorted_terms()[0]
    return content, q.scale(1 / lead), lead


@lru_cache(maxsize=100_000)
def to_poly(e: Expr) -> Poly:
    if isinstance(e, Const):
        return Poly.const(e.value)
    if isinstance(e, Sym):
        return Poly({((e, 1),): Fraction(1)})
    if isinstance(e, Add):
        out = Poly()
        for t in e.terms:
            out = out + to_poly(t)
        return out
    if isinstance(e, Mul):
        out = Poly.const(1)
        for f in e.factors:
            out = out * to_poly(f)
            if out.is_zero():
                break
        return out
    if isinstance(e, Pow):
        return _power_poly(to_poly(e.base), e.exp)
    if isinstance(e, Func):
        if e.name == "sqrt":
            return _power_poly(to_poly(e.arg), Fraction(1, 2))
        if e.name == "cbrt":
            return _power_poly(to_poly(e.arg), Fraction(1, 3))
        arg = to_poly(e.arg)
        if arg.is_zero():
            return Poly.const(0 if e.name == "sin" else 1)
        return Poly({((Func(e.name, export(arg)), 1),): Fraction(1)})
    raise TypeError(f"not an expression: {e!r}")


def _power_poly(base: Poly, p: Fraction) -> Poly:
    if p.denominator == 1:
        return base ** p.numerator
    c = base.constant_value()
    if c is not None:
        if c == 0:
            if p < 0:
                raise DivisionByZero("division by zero in normalization")
            return Poly()
        r = exact_root(c, p.denominator)
        if r is not None:
            return Poly.const(r) ** p.numerator
    root = Pow(export(base), Fraction(1, p.denominator))
    return _canon_monomial({root: p.numerator}, Fraction(1))


def _atom_power(a: Expr, e: int) -> Expr:
    if isinstance(a, Pow):
        return power(a.base, a.exp * e)
    return power(a, e)


def export(p: Poly) -> Expr:
    if p.is_zero():
        return ZERO
    terms = []
    for mono, c in p.sorted_terms():
        factors = [_atom_power(a, e) for a, e in mono]
        if factors:
            terms.append(mul(Const(c), *factors))
        else:
            terms.append(Const(c))
    if len(terms) == 1:
        return terms[0]
    # keep the canonical order: bypass add()'s constant folding reorder
    return Add(terms)


def normalize(e: Expr) -> Expr:
    """Expanded canonical form; agrees with ``e`` wherever ``e`` is defined."""
    return export(to_poly(e))


def is_zero(e: Expr) -> bool:
    return to_poly(e).is_zero()


def as_polynomial(e: Expr, variables) -> dict:
    """Split ``e`` as a polynomial in ``variables``.

    Returns a map from exponent tuples to coefficient expressions free of the
    variables; raises NotPolynomial when that is impossible.
    """
    names = [v.name if isinstance(v, Sym) else str(v) for v in variables]
    index = {n: i for i, n in enumerate(names)}
    grouped: dict = {}
    for mono, c in to_poly(e).terms.items():
        exps = [0] * len(names)
        rest = []
        for a, k in mono:
            if isinstance(a, Sym) and a.name in index:
                if k < 0:
                    raise NotPolynomial(f"negative power of {a.name}")
                exps[index[a.name]] = k
            else:
                if a.free_symbols() & set(names):
                    raise NotPolynomial(f"{a} depends on {sorted(a.free_symbols() & set(names))}")
                rest.append((a, k))
        key = tuple(exps)
        grouped.setdefault(key, Poly())
        grouped[key] = grouped[key] + Poly({tuple(rest): c})
    return {k: export(v) for k, v in grouped.items() if not v.is_zero()}


def total_degree(e: Expr, variables) -> int:
    poly = as_polynomial(e, variables)
    return max((sum(k) for k in poly), default=0)
