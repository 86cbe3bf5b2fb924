"""Momentum elimination by iterated Sylvester resultants.

For fixed values (E, l, a) of (H, L, A) the level set is projected to the
configuration plane:

    R1 = Res_py(H - E, L - l),  R2 = Res_py(H - E, A - a),  R = Res_px(R1, R2).

Resultants over-approximate the projection, so the result is reduced to its
distinct irreducible factors and the factors that do not carry real points
of the level set are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy as sp

from ..expr import Expr, NotPolynomial, as_polynomial, lambdify, normalize, substitute
from ..expr.core import mul
from .algebraic import (
    SYMBOLS,
    U,
    NotAlgebraic,
    cleared_poly,
    from_sympy,
    monic_integer,
    reduce_radius,
    squarefree_factors,
    to_sympy,
)

X, Y, PX, PY = (SYMBOLS[n] for n in ("x", "y", "px", "py"))


class EliminationError(Exception):
    pass


class NotEliminable(EliminationError):
    pass


class DegenerateResultant(EliminationError):
    def __init__(self, message, common_factor=None):
        super().__init__(message)
        self.common_factor = common_factor


def sylvester_matrix(f, g, var):
    """Sylvester matrix of f, g (sympy Polys) in ``var``; entries are Polys in the other gens."""
    others = [s for s in f.gens if s != var]
    fc = _coeffs(f, var, others)
    gc = _coeffs(g, var, others)
    m, n = len(fc) - 1, len(gc) - 1
    size = m + n
    zero = sp.Poly(0, *others, domain=f.domain) if others else sp.Integer(0)
    rows = []
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    return rows


def _coeffs(p, var, others):
    """Coefficients from the leading power of ``var`` down to the constant."""
    deg = p.degree(var)
    out = [sp.Poly(0, *others, domain=p.domain) for _ in range(deg + 1)]
    idx = p.gens.index(var)
    for monom, c in p.terms():
        k = monom[idx]
        rest = monom[:idx] + monom[idx + 1:]
        out[deg - k] = out[deg - k] + sp.Poly.from_dict({rest: c}, *others, domain=p.domain)
    return out


def bareiss_determinant(matrix):
    """Fraction-free determinant; every division is exact."""
    a = [row[:] for row in matrix]
    n = len(a)
    if n == 0:
        return None
    sign = 1
    prev = None
    for k in range(n - 1):
        if a[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero), None)
            if swap is None:
                return a[k][k] * 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num if prev is None else num.exquo(prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant(f, g, var):
    """Res_var(f, g) via the Sylvester determinant, as a Poly in the remaining gens.

    For univariate inputs the resultant is returned as a sympy number.
    """
    if len(f.gens) == 1:
        t = sp.Dummy("t")
        lift = [sp.Poly(p.as_expr(), var, t, domain=p.domain) for p in (f, g)]
        return resultant(*lift, var).as_expr()
    others = [s for s in f.gens if s != var]
    m, n = f.degree(var), g.degree(var)
    if f.is_zero or g.is_zero:
        return sp.Poly(0, *others, domain=f.domain)
    if m <= 0 and n <= 0:
        return sp.Poly(1, *others, domain=f.domain)
    if n == 0:
        return _coeffs(g, var, others)[0] ** m
    if m == 0:
        return _coeffs(f, var, others)[0] ** n
    return bareiss_determinant(sylvester_matrix(f, g, var))


@dataclass
class Elimination:
    equation: Expr
    factors: list
    rejected: list
    order: tuple
    raw_degree: int
    notes: list = field(default_factory=list)

    def __str__(self):
        return str(self.equation)


def _momentum_polynomial(e: Expr, gens):
    """Check polynomiality in the momenta, then clear denominators in the coordinates."""
    try:
        as_polynomial(e, ("px", "py"))
    except NotPolynomial as err:
        raise NotEliminable(f"not polynomial in the momenta: {err}") from err
    try:
        return cleared_poly(e, gens)
    except NotAlgebraic as err:
        raise NotEliminable(str(err)) from err


def eliminate_momenta(sysdef, constants, *, samples=None, window=(-5, 5, -5, 5), witness_grid: int = 48,
                      bindings=None) -> Elimination:
    """Implicit (x, y) equation of the level set {H=E, L=l, A=a}.

    ``samples`` (points on a known orbit) select the genuine factors when
    given; otherwise a factor is kept when points on its real zero set admit
    real momenta solving all three equations.
    """
    E, l, a = (Fraction(c) for c in constants)
    binding = dict(sysdef.params)
    binding.update(bindings or {})
    H, L, A = (substitute(f, binding) for f in (sysdef.H, sysdef.L, sysdef.A))
    uses_radius = any(to_sympy_safe(f).has(U) for f in (H, L, A))
    gens = [X, Y] + ([U] if uses_radius else []) + [PX, PY]
    eqs = [_momentum_polynomial(normalize(f - c), gens) for f, c in ((H, E), (L, l), (A, a))]
    fH, fL, fA = eqs

    notes = []
    order = (PY, PX)
    R1, R2 = resultant(fH, fL, PY), resultant(fH, fA, PY)
    if R1.is_zero or R2.is_zero:
        notes.append("py-first resultant vanished; eliminated px first")
        order = (PX, PY)
        R1, R2 = resultant(fH, fL, PX), resultant(fH, fA, PX)
    if R1.is_zero or R2.is_zero:
        pair = (fH, fL) if R1.is_zero else (fH, fA)
        common = sp.gcd(*pair)
        raise DegenerateResultant(f"first-stage resultant vanishes; common factor {common.as_expr()}",
                                  common.as_expr())
    R = resultant(R1, R2, order[1])
    if R.is_zero:
        common = sp.gcd(R1, R2)
        raise DegenerateResultant(f"resultant vanishes identically; common factor {common.as_expr()}",
                                  common.as_expr())
    plane = [X, Y] + ([U] if uses_radius else [])
    R = reduce_radius(sp.Poly(R.as_expr(), *plane, domain="QQ"))
    factors = [monic_integer(f) for f in squarefree_factors(R)]
    # monomial factors come from clearing denominators and live on excluded loci
    factors = [f for f in factors if len(f.terms()) > 1]
    if not factors:
        raise DegenerateResultant("resultant has no non-monomial factor")

    check = _SampleCheck(samples) if samples is not None else _WitnessCheck(
        (H, L, A), (E, l, a), R1, order, plane, window, witness_grid)
    kept, rejected = [], []
    for f in factors:
        verdict = check.genuine(f)
        if verdict is None:
            notes.append(f"factor kept without witnesses (no real points in the window): {f.as_expr()}")
        (rejected if verdict is False else kept).append(f)
    if not kept:
        notes.append("no factor passed the genuineness test; keeping all factors")
        kept, rejected = factors, []
    eq = normalize(mul(*(from_sympy(f.as_expr()) for f in kept)))
    return Elimination(
        equation=eq,
        factors=[normalize(from_sympy(f.as_expr())) for f in kept],
        rejected=[normalize(from_sympy(f.as_expr())) for f in rejected],
        order=tuple(str(v) for v in order),
        raw_degree=R.total_degree(),
        notes=notes,
    )


def to_sympy_safe(e: Expr):
    try:
        return to_sympy(e)
    except NotAlgebraic as err:
        raise NotEliminable(str(err)) from err


def _factor_function(f):
    expr = from_sympy(f.as_expr())
    fn = lambdify(normalize(expr), ["x", "y"], backend="numpy")
    terms = [lambdify(t, ["x", "y"], backend="numpy") for t in _terms(normalize(expr))]

    def scale(xs, ys):
        return 1.0 + sum(np.abs(np.broadcast_to(t(xs, ys), np.shape(xs))) for t in terms)

    return fn, scale


def _terms(e):
    from ..expr.core import Add

    return e.terms if isinstance(e, Add) else (e,)


class _SampleCheck:
    """A factor is genuine when it vanishes on every supplied orbit point."""

    def __init__(self, samples, tol: float = 1e-6):
        pts = np.asarray(samples, dtype=float)
        self.xs, self.ys = pts[:, 0], pts[:, 1]
        self.tol = tol

    def genuine(self, f) -> bool:
        fn, scale = _factor_function(f)
        with np.errstate(all="ignore"):
            rel = np.abs(fn(self.xs, self.ys)) / scale(self.xs, self.ys)
        return bool(np.nanmax(rel) < self.tol)


class _WitnessCheck:
    """A factor is genuine when most of its real points lift to real momenta.

    At a plane point the first-stage resultant R1 is a univariate polynomial
    in the momentum eliminated last; its real roots are candidates, and the
    other momentum is recovered from H = E.
    """

    def __init__(self, integrals, values, R1, order, plane, window, grid_n):
        self.window = window
        self.grid_n = grid_n
        self.values = [float(v) for v in values]
        self.first = 1 if order[0] == PY else 0  # index of the momentum eliminated first
        self.polys = []
        for f in integrals:
            coeffs = as_polynomial(normalize(f), ("px", "py"))
            self.polys.append({k: lambdify(c, ["x", "y"], backend="math") for k, c in coeffs.items()})
        w = order[1]
        coeffs = sp.Poly(R1.as_expr(), w).all_coeffs()
        args = [str(g) for g in plane]
        self.r1 = [sp.lambdify(args, c, "math") for c in coeffs]
        self.with_radius = U in plane

    def _lift(self, x: float, y: float) -> bool:
        try:
            numeric = [{k: c(x, y) for k, c in p.items()} for p in self.polys]
            plane = (x, y, float(np.hypot(x, y))) if self.with_radius else (x, y)
            r1 = [float(c(*plane)) for c in self.r1]
        except (ZeroDivisionError, ValueError, OverflowError):
            return False
        hp, lp, ap = numeric
        E, l, a = self.values
        for w in _real_roots(r1):
            for v in _real_roots(_univariate(hp, self.first, w, E)):
                mom = (v, w) if self.first == 0 else (w, v)
                if all(_small(p, *mom, ref) for p, ref in ((hp, E), (lp, l), (ap, a))):
                    return True
        return False

    def genuine(self, f):
        """True/False by majority of lifted witnesses; None when no real point was found."""
        from .trace import zero_crossings

        expr = normalize(from_sympy(f.as_expr()))
        pts = []
        for n in (self.grid_n, 3 * self.grid_n, 10 * self.grid_n):
            pts = zero_crossings(expr, self.window, n, limit=40)
            if len(pts) >= 8:
                break
        if len(pts) == 0:
            return None
        hits = sum(self._lift(float(x), float(y)) for x, y in pts)
        return hits >= max(1, len(pts) // 2)


def _small(p, px, py, ref, tol=1e-5) -> bool:
    value = sum(c * px**i * py**j for (i, j), c in p.items()) - ref
    scale = 1.0 + sum(abs(c * px**i * py**j) for (i, j), c in p.items()) + abs(ref)
    return abs(value) < tol * scale


def _univariate(p, var_index: int, fixed: float, ref: float = 0.0):
    """Coefficients (highest first) of p - ref in one momentum with the other fixed."""
    coeffs = {0: -ref}
    for (i, j), c in p.items():
        k, other = (i, j) if var_index == 0 else (j, i)
        coeffs[k] = coeffs.get(k, 0.0) + c * fixed**other
    deg = max((k for k, v in coeffs.items() if v != 0), default=0)
    return [coeffs.get(k, 0.0) for k in range(deg, -1, -1)]


def _real_roots(coeffs, tol=1e-5):
    coeffs = [float(c) for c in coeffs]
    big = max((abs(c) for c in coeffs), default=0.0)
    while len(coeffs) > 1 and abs(coeffs[0]) <= 1e-14 * big:
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs)
    scale = 1.0 + np.max(np.abs(roots)) if len(roots) else 1.0
    return [float(r.real) for r in roots if abs(r.imag) <= tol * scale]
