"""Zero-level tracing of implicit curves f(x, y) = 0 by marching squares.

Grid values are computed with a vectorized compiled form of the equation.
Crossings are located on cell edges by bisection, segments are chained
into polylines through shared edge crossings, and cells touching a domain
exclusion (or with non-finite values) are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..expr import Expr, lambdify, normalize, parse_domain
from ..expr.core import Add
from .algebraic import squarefree_part

BISECTION_STEPS = 50
RESIDUAL_TOL = 1e-9


class EmptyCurve(Exception):
    """No sign change anywhere in the window."""


@dataclass
class CurveSet:
    window: tuple
    curves: list  # list of (n, 2) float arrays
    closed: list
    residuals: list  # per-curve arrays of relative residuals |f| / scale
    residual_stats: dict
    grid_n: int
    equation: Expr | None = None
    notes: list = field(default_factory=list)
    regions: list = field(default_factory=list)  # per-curve signs of the exclusion functions

    @property
    def empty(self) -> bool:
        return not self.curves

    def __len__(self):
        return len(self.curves)

    def n_vertices(self) -> int:
        return sum(len(c) for c in self.curves)


class _Field:
    """Compiled f and its magnitude scale 1 + sum |term|."""

    def __init__(self, eq: Expr):
        eq = normalize(eq)
        self.eq = eq
        self.f = lambdify(eq, ["x", "y"], backend="numpy")
        terms = eq.terms if isinstance(eq, Add) else (eq,)
        self.terms = lambdify(list(terms), ["x", "y"], backend="numpy")

    def __call__(self, xs, ys):
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(self.f(xs, ys), dtype=float), np.shape(xs))

    def scale(self, xs, ys):
        with np.errstate(all="ignore"):
            total = np.ones(np.shape(xs))
            for t in self.terms(xs, ys):
                total = total + np.abs(np.broadcast_to(t, np.shape(xs)))
            return total


def _grid(window, n):
    x0, x1, y0, y1 = (float(v) for v in window)
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return xs, ys, X, Y


def _excluded_cells(domain, xs, ys, X, Y):
    """Boolean (n, n) mask of cells that touch an exclusion."""
    n = len(xs) - 1
    mask = np.zeros((n, n), dtype=bool)
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    for c in domain:
        g = lambdify(c.expr, ["x", "y"], backend="numpy")
        with np.errstate(all="ignore"):
            gv = np.broadcast_to(np.asarray(g(X, Y), dtype=float), X.shape)
            gc = np.broadcast_to(np.asarray(g(CX, CY), dtype=float), CX.shape)
        corners = np.stack([gv[:-1, :-1], gv[1:, :-1], gv[1:, 1:], gv[:-1, 1:]])
        bad = ~np.isfinite(corners).all(axis=0) | ~np.isfinite(gc)
        if c.op == ">":
            bad |= (corners <= 0).any(axis=0) | (gc <= 0)
        else:
            bad |= (corners == 0).any(axis=0) | (gc == 0)
            bad |= (np.sign(corners) != np.sign(corners[0])).any(axis=0)
            variation = np.abs(corners - gc).max(axis=0)
            bad |= np.abs(gc) < variation
        mask |= bad
    return mask


def _refine(field: _Field, ax, ay, bx, by, fa, steps=BISECTION_STEPS, tol=RESIDUAL_TOL):
    """Vectorized bisection on segments [a, b] with f(a) < 0 <= f(b) (or reversed)."""
    ax, ay, bx, by = (np.array(v, dtype=float) for v in (ax, ay, bx, by))
    neg_a = fa < 0
    mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
    for _ in range(steps):
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        fm = field(mx, my)
        done = np.abs(fm) < tol * field.scale(mx, my)
        if done.all():
            break
        same = (fm < 0) == neg_a
        ax = np.where(same & ~done, mx, ax)
        ay = np.where(same & ~done, my, ay)
        bx = np.where(~same & ~done, mx, bx)
        by = np.where(~same & ~done, my, by)
        # converged entries keep their midpoint
        ax = np.where(done, mx, ax)
        bx = np.where(done, mx, bx)
        ay = np.where(done, my, ay)
        by = np.where(done, my, by)
    fm = field(mx, my)
    rel = np.abs(fm) / field.scale(mx, my)
    return mx, my, rel


# segment table: for each of the 16 corner-sign cases, pairs of edges joined.
# corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges: 0 bottom(0-1) 1 right(1-2) 2 top(3-2) 3 left(0-3)
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    3: [(3, 1)], 12: [(3, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    6: [(0, 2)], 9: [(0, 2)],
    7: [(3, 2)], 8: [(3, 2)],
}


def _edge_key(i, j, e):
    # horizontal edges ("h", i, j) join (i,j)-(i+1,j); vertical ("v", i, j) join (i,j)-(i,j+1)
    return {0: ("h", i, j), 1: ("v", i + 1, j), 2: ("h", i, j + 1), 3: ("v", i, j)}[e]


def trace_curves(eq: Expr, window=(-5, 5, -5, 5), grid_n: int = 128, domain=(), *,
                 squarefree: bool = True, strict: bool = False) -> CurveSet:
    """Polylines approximating {eq = 0} inside ``window`` = (x_min, x_max, y_min, y_max)."""
    if grid_n < 16:
        raise ValueError("grid_n must be >= 16")
    domain = parse_domain(domain)
    notes = []
    traced = squarefree_part(eq) if squarefree else eq
    if traced != normalize(eq):
        notes.append("repeated factors removed before tracing")
    field_ = _Field(traced)
    xs, ys, X, Y = _grid(window, grid_n)
    F = field_(X, Y)
    finite = np.isfinite(F)
    pos = F >= 0  # zero counts as positive
    n = grid_n
    skip = _excluded_cells(domain, xs, ys, X, Y)
    skip |= ~(finite[:-1, :-1] & finite[1:, :-1] & finite[1:, 1:] & finite[:-1, 1:])
    idx = (pos[:-1, :-1].astype(int) | (pos[1:, :-1].astype(int) << 1)
           | (pos[1:, 1:].astype(int) << 2) | (pos[:-1, 1:].astype(int) << 3))
    idx[skip] = 0

    segments = []
    saddle_i, saddle_j = np.nonzero((idx == 5) | (idx == 10))
    centers = field_(0.5 * (xs[saddle_i] + xs[saddle_i + 1]), 0.5 * (ys[saddle_j] + ys[saddle_j + 1]))
    center_pos = {(i, j): c >= 0 for i, j, c in zip(saddle_i, saddle_j, centers)}
    for i, j in zip(*np.nonzero((idx != 0) & (idx != 15))):
        case = idx[i, j]
        if case in (5, 10):
            # corners 0 and 2 share a sign; when the centre has it too, they are
            # joined through the cell and corners 1 and 3 are cut off
            joined = center_pos[(i, j)] == (case == 5)
            pairs = [(3, 2), (0, 1)] if joined else [(3, 0), (1, 2)]
        else:
            pairs = _CASES[case]
        for e1, e2 in pairs:
            segments.append((_edge_key(i, j, e1), _edge_key(i, j, e2)))

    # locate crossing points on all edges used
    edges = sorted({k for s in segments for k in s})
    if not edges:
        cs = CurveSet(tuple(window), [], [], [], {"max": 0.0, "mean": 0.0}, grid_n, traced,
                      notes + ["EmptyCurve: no sign change in the window"])
        if strict:
            raise EmptyCurve("no sign change in the window")
        return cs
    ax = np.empty(len(edges))
    ay = np.empty(len(edges))
    bx = np.empty(len(edges))
    by = np.empty(len(edges))
    fa = np.empty(len(edges))
    for k, (kind, i, j) in enumerate(edges):
        ax[k], ay[k], fa[k] = xs[i], ys[j], F[i, j]
        if kind == "h":
            bx[k], by[k] = xs[i + 1], ys[j]
        else:
            bx[k], by[k] = xs[i], ys[j + 1]
    px, py, rel = _refine(field_, ax, ay, bx, by, fa)
    point = {e: k for k, e in enumerate(edges)}
    # drop crossings that are sign changes through a pole rather than a zero
    good = rel < 1e-6
    segments = [s for s in segments if good[point[s[0]]] and good[point[s[1]]]]

    adj: dict = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen_edges = set()
    curves, closed, residuals, regions = [], [], [], []
    excl = [lambdify(c.expr, ["x", "y"], backend="math") for c in domain if c.op == "!="]

    def walk(start):
        path = [start]
        prev, cur = None, start
        while True:
            nxt = [v for v in adj[cur] if v != prev and (cur, v) not in seen_edges]
            if not nxt:
                return path, False
            v = nxt[0]
            seen_edges.add((cur, v))
            seen_edges.add((v, cur))
            if v == start:
                return path + [v], True
            path.append(v)
            prev, cur = cur, v

    def emit(path, is_closed):
        ids = [point[e] for e in path]
        pts = np.column_stack([px[ids], py[ids]])
        curves.append(pts)
        closed.append(is_closed)
        residuals.append(rel[ids])
        mid = pts[len(pts) // 2]
        regions.append(tuple(g(float(mid[0]), float(mid[1])) > 0 for g in excl))

    # open chains start at endpoints (degree 1); the rest are loops
    for node in sorted(adj):
        if len(adj[node]) == 1 and not any((node, v) in seen_edges for v in adj[node]):
            path, _ = walk(node)
            emit(path, False)
    for node in sorted(adj):
        if any((node, v) not in seen_edges for v in adj[node]):
            path, is_closed = walk(node)
            emit(path, is_closed)

    allres = np.concatenate(residuals) if residuals else np.zeros(0)
    stats = {"max": float(allres.max()) if allres.size else 0.0,
             "mean": float(allres.mean()) if allres.size else 0.0}
    return CurveSet(tuple(window), curves, closed, residuals, stats, grid_n, traced, notes, regions)


def zero_crossings(eq: Expr, window, grid_n: int = 48, limit: int | None = None, domain=()):
    """Points on {eq = 0}: refined sign changes along grid edges (evenly subsampled to ``limit``)."""
    field_ = _Field(eq)
    xs, ys, X, Y = _grid(window, grid_n)
    F = field_(X, Y)
    ok = np.isfinite(F)
    pos = F >= 0
    cand = []
    h = (pos[:-1, :] != pos[1:, :]) & ok[:-1, :] & ok[1:, :]
    for i, j in zip(*np.nonzero(h)):
        cand.append((xs[i], ys[j], xs[i + 1], ys[j], F[i, j]))
    v = (pos[:, :-1] != pos[:, 1:]) & ok[:, :-1] & ok[:, 1:]
    for i, j in zip(*np.nonzero(v)):
        cand.append((xs[i], ys[j], xs[i], ys[j + 1], F[i, j]))
    if not cand:
        return np.zeros((0, 2))
    c = np.array(cand)
    px, py, rel = _refine(field_, c[:, 0], c[:, 1], c[:, 2], c[:, 3], c[:, 4])
    keep = rel < 1e-6
    if domain:
        from ..expr import in_domain

        doms = parse_domain(domain)
        keep &= np.array([in_domain(doms, {"x": float(a), "y": float(b)}) for a, b in zip(px, py)])
    pts = np.column_stack([px[keep], py[keep]])
    if limit is not None and len(pts) > limit:
        sel = np.linspace(0, len(pts) - 1, limit).round().astype(int)
        pts = pts[sel]
    return pts


def component_labels(cs: CurveSet, radius_cells: float = 2.5) -> list:
    """Label polylines by connected component of the traced zero set.

    Marching squares splits curves at crossings (and at skipped cells), so
    polylines passing within ``radius_cells`` grid cells of each other are
    merged with a union-find.  Polylines on opposite sides of an exclusion
    (e.g. x != 0) are never merged.
    """
    n = len(cs.curves)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    x0, x1, y0, y1 = (float(v) for v in cs.window)
    cell = max((x1 - x0), (y1 - y0)) / cs.grid_n
    r2 = (radius_cells * cell) ** 2
    boxes = [(c.min(axis=0), c.max(axis=0)) for c in cs.curves]
    pad = radius_cells * cell
    for i in range(n):
        for j in range(i + 1, n):
            if cs.regions and cs.regions[i] != cs.regions[j]:
                continue
            (lo1, hi1), (lo2, hi2) = boxes[i], boxes[j]
            if (lo1 - pad > hi2).any() or (lo2 - pad > hi1).any():
                continue
            d = cs.curves[i][:, None, :] - cs.curves[j][None, :, :]
            if (np.einsum("abk,abk->ab", d, d) <= r2).any():
                parent[find(i)] = find(j)
    roots = {}
    return [roots.setdefault(find(i), len(roots)) for i in range(n)]


def components(cs: CurveSet, radius_cells: float = 2.5) -> int:
    """Number of connected components of the traced curve set."""
    return len(set(component_labels(cs, radius_cells)))
