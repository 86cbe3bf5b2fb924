from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import Add, Const, Expr, Func, Mul, Pow, Sym
from .errors import DivisionByZero, EvenRootOfNegative, UnboundSymbol


@dataclass(frozen=True)
class PhasePoint:
    """An assignment of the four phase-space variables plus parameter values."""

    x: object
    y: object
    px: object
    py: object
    params: Mapping[str, object] = field(default_factory=dict)

    def bindings(self) -> dict:
        out = dict(self.params)
        out.update(x=self.x, y=self.y, px=self.px, py=self.py)
        return out

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "PhasePoint":
        rest = {k: v for k, v in values.items() if k not in ("x", "y", "px", "py")}
        return cls(values["x"], values["y"], values["px"], values["py"], rest)


def _iroot(k: int, n: int):
    """Integer n-th root of k >= 0 if exact, else None."""
    if k < 2:
        return k
    r = int(round(k ** (1.0 / n))) if k.bit_length() < 1000 else _newton_root(k, n)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == k:
            return cand
    r = _newton_root(k, n)
    return r if r**n == k else None


def _newton_root(k: int, n: int) -> int:
    x = 1 << ((k.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + k // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def exact_root(v: Fraction, n: int):
    """Real n-th root of a rational when it is rational; None otherwise."""
    if v < 0:
        if n % 2 == 0:
            raise EvenRootOfNegative(f"even root of negative value {v}")
        r = exact_root(-v, n)
        return None if r is None else -r
    num = _iroot(v.numerator, n)
    if num is None:
        return None
    den = _iroot(v.denominator, n)
    if den is None:
        return None
    return Fraction(num, den)


def rational_power(v, p: Fraction):
    """Real-valued v**p with exact results whenever they are rational."""
    if v == 0:
        if p < 0:
            raise DivisionByZero("division by zero")
        return Fraction(0) if isinstance(v, Fraction) else 0.0
    q = p.denominator
    if q == 1:
        return v ** p.numerator
    if v < 0 and q % 2 == 0:
        raise EvenRootOfNegative(f"even root of negative value {v}")
    if isinstance(v, Fraction):
        r = exact_root(v, q)
        if r is not None:
            return r ** p.numerator
    f = float(v)
    root = math.copysign(abs(f) ** (1.0 / q), f)
    if q == 3:
        root = math.copysign(_cbrt(abs(f)), f)
    return root ** p.numerator


def _cbrt(a: float) -> float:
    r = a ** (1.0 / 3.0)
    if r:
        r -= (r * r * r - a) / (3 * r * r)
    return r


def _coerce(v, floating: bool):
    if floating:
        return float(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    return Fraction(v)


def evaluate(e: Expr, point, *, floating: bool = False):
    """Evaluate ``e`` at ``point`` (a PhasePoint or a name -> value mapping).

    Exact rational arithmetic is kept as long as the bindings are rational and
    no irrational root or trig value is met; the result is a float otherwise.
    """
    if isinstance(point, PhasePoint):
        point = point.bindings()
    env = {k: _coerce(v, floating) for k, v in point.items()}
    cache: dict = {}

    def go(node):
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = float(node.value) if floating else node.value
        elif isinstance(node, Sym):
            try:
                out = env[node.name]
            except KeyError:
                raise UnboundSymbol(node.name) from None
        elif isinstance(node, Add):
            out = 0
            for t in node.terms:
                out = out + go(t)
        elif isinstance(node, Mul):
            out = 1
            for f in node.factors:
                out = out * go(f)
        elif isinstance(node, Pow):
            out = rational_power(go(node.base), node.exp)
        elif isinstance(node, Func):
            a = go(node.arg)
            if node.name == "sqrt":
                out = rational_power(a, Fraction(1, 2))
            elif node.name == "cbrt":
                out = rational_power(a, Fraction(1, 3))
            elif a == 0 and isinstance(a, Fraction):
                out = Fraction(0) if node.name == "sin" else Fraction(1)
            else:
                out = math.sin(a) if node.name == "sin" else math.cos(a)
        else:
            raise TypeError(f"not an expression: {node!r}")
        cache[node] = out
        return out

    return go(e)
