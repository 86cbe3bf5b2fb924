"""Numerical integration of Hamilton's equations.

Used to cross-validate the algebra: along an integrated orbit H, L and A stay
constant and the configuration-space points satisfy the implicit trajectory
equations.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .expr import (
    COORDS,
    MOMENTA,
    PHASE_VARS,
    NotPolynomial,
    Expr,
    PhasePoint,
    derive_seed,
    differentiate,
    evaluate,
    lambdify,
    normalize,
    substitute,
    total_degree,
)

MAX_SAMPLES = 10_000
SINGULAR_DISTANCE = 1e-6
TRAJECTORY_COLUMNS = ("t", "x", "y", "px", "py", "H", "L", "A")

# Seed boxes (x, y, px, py ranges) giving regular orbits over t ~ 20 with the
# default parameters; initial conditions are rationals on a 1/8 lattice.
IC_BOXES = {
    "harmonic-isotropic": ((-2, 2), (-2, 2), (-2, 2), (-2, 2)),
    "kepler": ((Fraction(3, 4), Fraction(5, 4)), (Fraction(-1, 4), Fraction(1, 4)),
               (Fraction(-1, 4), Fraction(1, 4)), (Fraction(3, 4), Fraction(9, 8))),
    "fokas-lagerstrom": ((-2, 2), (-2, 2), (-1, 1), (-1, 1)),
    "holt": ((Fraction(1, 2), 2), (-1, 1), (-1, 1), (-1, 1)),
    "smorodinsky-winternitz": ((Fraction(1, 2), 2), (-1, 1), (-1, 1), (-1, 1)),
    "post-winternitz": ((40, 60), (Fraction(-1, 2), Fraction(1, 2)),
                        (Fraction(-1, 4), Fraction(1, 4)), (Fraction(-1, 4), Fraction(1, 4))),
    "trig-momentum": ((-2, 2), (Fraction(1, 8), Fraction(1, 2)), (-1, 1), (Fraction(1, 8), Fraction(3, 8))),
    "curved-oscillator": ((-1, 1), (-1, 1), (-1, 1), (-1, 1)),
}
DEFAULT_BOX = ((Fraction(1, 2), Fraction(3, 2)), (-1, 1), (-1, 1), (-1, 1))


class DynamicsError(Exception):
    pass


class SingularityError(DynamicsError):
    """The orbit reached an excluded locus or produced non-finite values."""

    def __init__(self, message: str, t_last: float, state=None):
        super().__init__(f"{message} (last valid t = {t_last:.6g})")
        self.t_last = t_last
        self.state = state


class NotSeparable(DynamicsError, ValueError):
    pass


@dataclass
class Trajectory:
    t: np.ndarray  # (n,)
    states: np.ndarray  # (n, 4) columns x, y, px, py
    values: np.ndarray  # (n, 3) columns H, L, A
    integrals_at_start: tuple
    drift: dict
    method: str
    dt: float
    system: str = ""
    notes: list = field(default_factory=list)

    @property
    def samples(self):
        """Time-ordered (t, PhasePoint) pairs."""
        return [(float(t), PhasePoint(*map(float, s))) for t, s in zip(self.t, self.states)]

    def __len__(self):
        return len(self.t)

    def to_csv(self, out=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for t, s, v in zip(self.t, self.states, self.values):
            w.writerow([f"{t:.10g}"] + [f"{c:.15g}" for c in s] + [f"{c:.15g}" for c in v])
        text = buf.getvalue()
        if out is not None:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def hamilton_rhs(H: Expr) -> tuple:
    """(dx/dt, dy/dt, dpx/dt, dpy/dt) = (dH/dpx, dH/dpy, -dH/dx, -dH/dy)."""
    return (
        normalize(differentiate(H, "px")),
        normalize(differentiate(H, "py")),
        normalize(-differentiate(H, "x")),
        normalize(-differentiate(H, "y")),
    )


def _bound(sysdef, params=None):
    """H, L, A with every parameter replaced by its (default or given) value."""
    values = dict(sysdef.params)
    values.update(params or {})
    values = {k: Fraction(v) for k, v in values.items()}
    out = tuple(normalize(substitute(f, values)) for f in (sysdef.H, sysdef.L, sysdef.A))
    for f in out:
        extra = set(f.free_symbols()) - set(PHASE_VARS)
        if extra:
            raise DynamicsError(f"no value for parameter(s) {', '.join(sorted(extra))}")
    return out


def constants_of(sysdef, point, params=None) -> tuple:
    """(E, l, a): H, L, A at a phase point (exact when the point is rational and no root is irrational)."""
    if not isinstance(point, PhasePoint):
        point = PhasePoint(*point)
    H, L, A = _bound(sysdef, {**dict(point.params), **(params or {})})
    b = {"x": point.x, "y": point.y, "px": point.px, "py": point.py}
    exact = all(isinstance(v, (int, Fraction)) for v in b.values())
    if exact:
        b = {k: Fraction(v) for k, v in b.items()}
        try:
            return tuple(evaluate(f, b) for f in (H, L, A))
        except (ValueError, ArithmeticError):
            pass
    return tuple(float(evaluate(f, b, floating=True)) for f in (H, L, A))


class _Guard:
    """Distance-like measures of the excluded loci; small values abort integration."""

    def __init__(self, domain):
        self.checks = []
        for c in domain:
            deg = _degree(c.expr)
            fn = lambdify(c.expr, ["x", "y"], backend="math")
            self.checks.append((fn, c.op, deg, str(c)))

    def __call__(self, x, y):
        for fn, op, deg, label in self.checks:
            try:
                g = fn(x, y)
            except (ValueError, ZeroDivisionError, OverflowError):
                return label
            if op == ">" and g < SINGULAR_DISTANCE:
                return label
            if op == "!=" and abs(g) ** (1.0 / deg) < SINGULAR_DISTANCE:
                return label
        return None

    def crossed(self, a, b):
        """Label of a "!=" locus separating the points a and b (a step that jumped over it)."""
        for fn, op, _, label in self.checks:
            if op == "!=" and fn(*a) * fn(*b) < 0:
                return label
        return None


def _degree(e) -> int:
    try:
        return max(1, total_degree(e, COORDS))
    except NotPolynomial:
        return 1


def is_separable(H: Expr) -> bool:
    """True when H = T(px, py) + V(x, y)."""
    for q in COORDS:
        if set(differentiate(H, q).free_symbols()) & set(MOMENTA):
            return False
    for p in MOMENTA:
        if set(differentiate(H, p).free_symbols()) & set(COORDS):
            return False
    return True


def integrate(sysdef, ic, t_end: float, dt: float, method: str = "rk4", *, params=None,
              max_samples: int = MAX_SAMPLES) -> Trajectory:
    """Fixed-step integration of Hamilton's equations from ``ic`` = (x, y, px, py)."""
    if method not in ("rk4", "leapfrog"):
        raise ValueError(f"unknown method {method!r} (rk4 or leapfrog)")
    if dt <= 0 or t_end <= 0:
        raise ValueError("t_end and dt must be positive")
    H, L, A = _bound(sysdef, params)
    if method == "leapfrog" and not (sysdef.separable and is_separable(H)):
        raise NotSeparable(f"{sysdef.name or 'system'}: leapfrog needs H = T(p) + V(q)")
    rhs = lambdify(hamilton_rhs(H), list(PHASE_VARS), backend="math")
    integrals = lambdify([H, L, A], list(PHASE_VARS), backend="math")
    guard = _Guard(sysdef.domain)
    if isinstance(ic, PhasePoint):
        ic = (ic.x, ic.y, ic.px, ic.py)
    state = tuple(float(v) for v in ic)
    where = guard(state[0], state[1])
    if where:
        raise SingularityError(f"initial condition violates {where}", 0.0, state)

    n_steps = max(1, int(round(t_end / dt)))
    stride = max(1, math.ceil(n_steps / (max_samples - 1)))
    step = _rk4_step if method == "rk4" else _leapfrog_step
    ts, states = [0.0], [state]
    for k in range(1, n_steps + 1):
        try:
            new = step(rhs, state, dt)
        except (ValueError, ZeroDivisionError, OverflowError):
            raise SingularityError("evaluation failed", (k - 1) * dt, state) from None
        if not all(math.isfinite(v) for v in new):
            raise SingularityError("non-finite state", (k - 1) * dt, state)
        where = guard(new[0], new[1]) or guard.crossed(state[:2], new[:2])
        if where:
            raise SingularityError(f"orbit reached the excluded locus {where}", (k - 1) * dt, state)
        state = new
        if k % stride == 0 or k == n_steps:
            ts.append(k * dt)
            states.append(state)
    t = np.array(ts)
    S = np.array(states)
    V = np.array([integrals(*s) for s in states], dtype=float)
    drift = {name: float(np.max(np.abs(V[:, i] - V[0, i]))) for i, name in enumerate(("H", "L", "A"))}
    return Trajectory(t, S, V, tuple(float(v) for v in V[0]), drift, method, dt, sysdef.name)


def _rk4_step(f, s, h):
    k1 = f(*s)
    k2 = f(*(a + 0.5 * h * b for a, b in zip(s, k1)))
    k3 = f(*(a + 0.5 * h * b for a, b in zip(s, k2)))
    k4 = f(*(a + h * b for a, b in zip(s, k3)))
    return tuple(a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4))


def _leapfrog_step(f, s, h):
    # kick-drift-kick; for separable H the force depends on (x, y) only
    x, y, px, py = s
    _, _, fx, fy = f(x, y, px, py)
    px, py = px + 0.5 * h * fx, py + 0.5 * h * fy
    vx, vy, _, _ = f(x, y, px, py)
    x, y = x + h * vx, y + h * vy
    _, _, fx, fy = f(x, y, px, py)
    return (x, y, px + 0.5 * h * fx, py + 0.5 * h * fy)


def sample_initial_conditions(sysdef, n: int, seed: int = 0, *, screen_t: float | None = None,
                              screen_dt: float = 1e-2, box=None, max_tries: int = 200) -> list:
    """``n`` seeded rational initial conditions inside the system's domain.

    With ``screen_t`` set, candidates whose coarse orbit hits an exclusion
    (or blows up) before ``screen_t`` are skipped.
    """
    box = box or IC_BOXES.get(sysdef.name, DEFAULT_BOX)
    rng = random.Random(derive_seed(seed, "ic", sysdef.name))
    guard = _Guard(sysdef.domain)
    out = []
    for _ in range(max_tries):
        if len(out) == n:
            break
        ic = PhasePoint(*(_lattice(rng, lo, hi) for lo, hi in box))
        if guard(float(ic.x), float(ic.y)):
            continue
        if screen_t:
            try:
                integrate(sysdef, ic, screen_t, screen_dt, max_samples=2)
            except DynamicsError:
                continue
        out.append(ic)
    if len(out) < n:
        raise DynamicsError(f"found only {len(out)} of {n} regular initial conditions")
    return out


def _lattice(rng, lo, hi, den: int = 8) -> Fraction:
    a, b = math.ceil(Fraction(lo) * den), math.floor(Fraction(hi) * den)
    return Fraction(rng.randint(a, b), den)


__all__ = [
    "DynamicsError",
    "IC_BOXES",
    "NotSeparable",
    "SingularityError",
    "TRAJECTORY_COLUMNS",
    "Trajectory",
    "constants_of",
    "hamilton_rhs",
    "integrate",
    "is_separable",
    "sample_initial_conditions",
]
