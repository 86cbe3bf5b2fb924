"""Compile expressions to fast floating-point Python callables.

Shared subtrees are evaluated once (common-subexpression elimination falls
out of the structural hashing of nodes).  The ``numpy`` backend accepts
arrays and is used for grid evaluation; the ``math`` backend is used for
ODE right-hand sides where per-call overhead matters.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import Add, Const, Expr, Func, Mul, Pow, Sym


def _cbrt_scalar(a: float) -> float:
    r = math.copysign(abs(a) ** (1.0 / 3.0), a)
    if r:
        r -= (r * r * r - a) / (3 * r * r)
    return r


def _root_scalar(a: float, q: int) -> float:
    if a < 0:
        if q % 2 == 0:
            raise ValueError("even root of a negative value")
        return -((-a) ** (1.0 / q))
    return a ** (1.0 / q)


def _root_array(a, q: int):
    if q % 2 == 0:
        return np.power(a, 1.0 / q)
    return np.sign(a) * np.abs(a) ** (1.0 / q)


_NAMESPACES = {
    "math": {
        "sin": math.sin,
        "cos": math.cos,
        "sqrt": math.sqrt,
        "cbrt": _cbrt_scalar,
        "root": _root_scalar,
    },
    "numpy": {
        "sin": np.sin,
        "cos": np.cos,
        "sqrt": np.sqrt,
        "cbrt": np.cbrt,
        "root": _root_array,
    },
}


def _literal(v: Fraction) -> str:
    if v.denominator == 1:
        return f"{float(v.numerator)!r}"
    return repr(float(v))


class _Emitter:
    def __init__(self, args):
        self.args = {a: f"a{i}" for i, a in enumerate(args)}
        self.lines: list = []
        self.names: dict = {}

    def name_for(self, node: Expr) -> str:
        if isinstance(node, Sym):
            try:
                return self.args[node.name]
            except KeyError:
                raise ValueError(f"symbol {node.name!r} is not an argument") from None
        if isinstance(node, Const):
            return _literal(node.value)
        hit = self.names.get(node)
        if hit is not None:
            return hit
        code = self.code_for(node)
        var = f"t{len(self.names)}"
        self.names[node] = var
        self.lines.append(f"    {var} = {code}")
        return var

    def code_for(self, node: Expr) -> str:
        if isinstance(node, Add):
            return " + ".join(self.name_for(t) for t in node.terms)
        if isinstance(node, Mul):
            return " * ".join(self.name_for(f) for f in node.factors)
        if isinstance(node, Pow):
            b = self.name_for(node.base)
            p, q = node.exp.numerator, node.exp.denominator
            if q == 1:
                return f"{b} ** {p}" if p > 0 else f"1.0 / {b} ** {-p}"
            r = {2: f"sqrt({b})", 3: f"cbrt({b})"}.get(q, f"root({b}, {q})")
            if p == 1:
                return r
            return f"{r} ** {p}" if p > 0 else f"1.0 / {r} ** {-p}"
        if isinstance(node, Func):
            return f"{node.name}({self.name_for(node.arg)})"
        raise TypeError(f"not an expression: {node!r}")


def lambdify(exprs, args, backend: str = "math"):
    """Return f(*values) evaluating ``exprs`` (one expression or a sequence).

    A single expression yields a scalar (or array); a sequence yields a tuple.
    """
    single = isinstance(exprs, Expr)
    seq = [exprs] if single else list(exprs)
    em = _Emitter(args)
    outs = [em.name_for(e) for e in seq]
    params = ", ".join(em.args[a] for a in args)
    body = "\n".join(em.lines)
    ret = outs[0] if single else "(" + ", ".join(outs) + ("," if len(outs) == 1 else "") + ")"
    src = f"def _f({params}):\n{body}\n    return {ret}\n"
    ns = dict(_NAMESPACES[backend])
    exec(compile(src, "<superalg-codegen>", "exec"), ns)
    fn = ns["_f"]
    fn.source = src
    return fn
