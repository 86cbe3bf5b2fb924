"""Immutable expression trees over phase-space variables and parameters."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

PHASE_VARS = ("x", "y", "px", "py")
COORDS = ("x", "y")
MOMENTA = ("px", "py")
FUNCTIONS = ("sin", "cos", "sqrt", "cbrt")


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact rational")


class Expr:
    """Base node. Subclasses are immutable and compare structurally."""

    __slots__ = ("_hash", "_free")

    def _key(self):
        raise NotImplementedError

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r})"

    def __str__(self):
        from .printer import to_string

        return to_string(self)

    # arithmetic sugar ------------------------------------------------
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return add(self, neg(_wrap(other)))

    def __rsub__(self, other):
        return add(_wrap(other), neg(self))

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return mul(self, power(_wrap(other), -1))

    def __rtruediv__(self, other):
        return mul(_wrap(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    @property
    def children(self) -> tuple:
        return ()

    def free_symbols(self) -> frozenset:
        try:
            return self._free
        except AttributeError:
            if isinstance(self, Sym):
                out = frozenset((self.name,))
            else:
                out = frozenset().union(*(c.free_symbols() for c in self.children))
            object.__setattr__(self, "_free", out)
            return out


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", as_fraction(value))

    def _key(self):
        return self.value


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", str(name))

    def _key(self):
        return self.name


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))

    def _key(self):
        return self.terms

    @property
    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))

    def _key(self):
        return self.factors

    @property
    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", as_fraction(exp))

    def _key(self):
        return (self.base, self.exp)

    @property
    def children(self):
        return (self.base,)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unsupported function {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def _key(self):
        return (self.name, self.arg)

    @property
    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def _wrap(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(value)


def symbols(names: str):
    out = tuple(Sym(n) for n in names.replace(",", " ").split())
    return out[0] if len(out) == 1 else out


# smart constructors: flatten, fold constants, drop identities; never expand.


def add(*terms) -> Expr:
    flat = []
    total = Fraction(0)
    for t in terms:
        t = _wrap(t)
        parts = t.terms if isinstance(t, Add) else (t,)
        for p in parts:
            if isinstance(p, Const):
                total += p.value
            else:
                flat.append(p)
    if total != 0:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*factors) -> Expr:
    flat = []
    coeff = Fraction(1)
    for f in factors:
        f = _wrap(f)
        parts = f.factors if isinstance(f, Mul) else (f,)
        for p in parts:
            if isinstance(p, Const):
                coeff *= p.value
            else:
                flat.append(p)
    if coeff == 0:
        return ZERO
    if coeff != 1:
        flat.insert(0, Const(coeff))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def power(base, exponent) -> Expr:
    base = _wrap(base)
    exponent = as_fraction(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if exponent.denominator == 1 and not (base.value == 0 and exponent < 0):
            return Const(base.value ** int(exponent))
        if base.value == 1:
            return ONE
    if isinstance(base, Pow) and exponent.denominator == 1:
        return power(base.base, base.exp * exponent)
    return Pow(base, exponent)


def func(name: str, arg) -> Expr:
    return Func(name, _wrap(arg))


def sin(arg):
    return func("sin", arg)


def cos(arg):
    return func("cos", arg)


def sqrt(arg):
    return func("sqrt", arg)


def cbrt(arg):
    return func("cbrt", arg)


def substitute(e: Expr, mapping) -> Expr:
    """Replace symbols by expressions (or numbers); rebuilds through smart constructors."""
    mapping = {k.name if isinstance(k, Sym) else k: _wrap(v) for k, v in mapping.items()}
    if not mapping:
        return e
    cache = {}

    def go(node):
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Sym):
            out = mapping.get(node.name, node)
        elif isinstance(node, Const):
            out = node
        elif isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exp)
        else:
            out = func(node.name, go(node.arg))
        cache[node] = out
        return out

    return go(e)


def contains_function(e: Expr) -> bool:
    if isinstance(e, Func):
        return True
    return any(contains_function(c) for c in e.children)


def has_fractional_power(e: Expr) -> bool:
    if isinstance(e, Pow) and e.exp.denominator != 1:
        return True
    return any(has_fractional_power(c) for c in e.children)


def is_polynomial_system(*exprs: Expr) -> bool:
    """True when no transcendental function or fractional power appears."""
    return not any(contains_function(e) or has_fractional_power(e) for e in exprs)
