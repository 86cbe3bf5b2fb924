"""Canonical Poisson bracket on (x, y, px, py) and integral-of-motion checks."""

from __future__ import annotations

from .expr import PHASE_VARS, differentiate, equal_identically
from .expr.core import Const, add, mul, neg
from .expr.normal import normalize

CANONICAL_PAIRS = (("x", "px"), ("y", "py"))


def bracket_raw(f, g):
    """{f, g} without normalization (useful when the caller normalizes later)."""
    terms = []
    for q, p in CANONICAL_PAIRS:
        terms.append(mul(differentiate(f, q), differentiate(g, p)))
        terms.append(neg(mul(differentiate(f, p), differentiate(g, q))))
    return add(*terms)


def poisson_bracket(f, g):
    """{f,g} = f_x g_px + f_y g_py - f_px g_x - f_py g_y, normalized."""
    return normalize(bracket_raw(f, g))


def is_integral(f, H, domain=(), seed: int = 0, *, trials: int = 20, method: str | None = None):
    """Check {f, H} == 0 on the domain; returns an IdentityResult.

    By default polynomial inputs get a symbolic proof and anything with
    radicals or trig functions is certified by sampling.
    """
    if method is None:
        from .expr.core import is_polynomial_system

        method = "auto" if is_polynomial_system(f, H) else "sampled"
    names = set(PHASE_VARS) | f.free_symbols() | H.free_symbols()
    return equal_identically(poisson_bracket(f, H), Const(0), domain, trials, seed, method=method,
                             variables=sorted(names))
