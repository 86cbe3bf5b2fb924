"""Seeded randomized identity testing with exact arithmetic where possible."""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .core import PHASE_VARS, Expr, Func, Pow, Sym, add, neg
from .errors import EvaluationError, SamplingError
from .evaluate import evaluate
from .normal import Poly, to_poly
from .parser import parse

DEFAULT_REL_TOL = 1e-10
NUM_RANGE = 50


def derive_seed(seed: int, *labels) -> int:
    """Deterministic sub-seed for a labelled sub-task."""
    h = hashlib.blake2b(repr((int(seed),) + labels).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class Constraint:
    """``expr != 0`` or ``expr > 0``."""

    expr: Expr
    op: str

    _PATTERN = re.compile(r"^(.*?)(!=|>)\s*0\s*$")

    @classmethod
    def parse(cls, text: str, params=()) -> "Constraint":
        m = cls._PATTERN.match(text.strip())
        if not m:
            raise ValueError(f"domain predicate must look like 'expr != 0' or 'expr > 0': {text!r}")
        return cls(parse(m.group(1), params), m.group(2))

    def holds(self, bindings: Mapping) -> bool:
        try:
            v = evaluate(self.expr, bindings)
        except EvaluationError:
            return False
        return v != 0 if self.op == "!=" else v > 0

    def margin(self, bindings: Mapping) -> float:
        """Distance-like quantity used by the integrator's singularity guard."""
        v = float(evaluate(self.expr, bindings, floating=True))
        return abs(v) if self.op == "!=" else v

    def __str__(self):
        return f"{self.expr} {self.op} 0"


def parse_domain(predicates: Iterable[str], params=()) -> tuple:
    return tuple(p if isinstance(p, Constraint) else Constraint.parse(p, params) for p in predicates)


def in_domain(domain, bindings: Mapping) -> bool:
    return all(c.holds(bindings) for c in domain)


def _collect_root_bases(poly: Poly, out: list, seen: set):
    for atom in poly.atoms():
        if atom in seen:
            continue
        seen.add(atom)
        if isinstance(atom, Pow):
            if atom.exp > 0:
                out.append((atom.base, atom.exp.denominator))
            _collect_root_bases(to_poly(atom.base), out, seen)
        elif isinstance(atom, Func):
            _collect_root_bases(to_poly(atom.arg), out, seen)


def _sum_of_two_squares(base: Expr):
    """Return (s1, s2) if base normalizes to s1^2 + s2^2 for symbols s1, s2."""
    terms = to_poly(base).terms
    if len(terms) != 2 or any(c != 1 for c in terms.values()):
        return None
    names = []
    for mono in terms:
        if len(mono) != 1:
            return None
        (a, e), = mono
        if not isinstance(a, Sym) or e != 2:
            return None
        names.append(a.name)
    return tuple(names)


class PointSampler:
    """Draws rational points, choosing coordinates that keep radicals rational.

    A symbol under a q-th root is drawn as r**q, and a pair under
    ``sqrt(s1^2 + s2^2)`` is drawn on a scaled rational circle, so exact
    evaluation survives whenever the structure allows it.
    """

    def __init__(self, exprs, domain=(), seed: int = 0, fixed: Mapping | None = None,
                 num_range: int = NUM_RANGE, max_rejections: int = 2000, variables=()):
        self.fixed = dict(fixed or {})
        self.domain = tuple(domain)
        self.rng = random.Random(seed)
        self.num_range = num_range
        self.max_rejections = max_rejections
        names = set(variables)
        bases: list = []
        seen: set = set()
        for e in exprs:
            names |= e.free_symbols()
            _collect_root_bases(to_poly(e), bases, seen)
        for c in self.domain:
            names |= c.expr.free_symbols()
        self.names = sorted(n for n in names if n not in self.fixed)
        self.powers: dict = {}
        self.circles: list = []
        taken = set()
        for base, q in bases:
            if isinstance(base, Sym) and base.name in self.names and base.name not in taken:
                self.powers[base.name] = q
                taken.add(base.name)
                continue
            pair = _sum_of_two_squares(base)
            if pair and all(n in self.names and n not in taken for n in pair):
                self.circles.append(pair)
                taken.update(pair)

    def rational(self) -> Fraction:
        r = self.num_range
        return Fraction(self.rng.randint(-r, r), self.rng.randint(1, r))

    def draw(self) -> dict:
        point = dict(self.fixed)
        for a, b in self.circles:
            s = self.rational()
            t = self.rational()
            d = 1 + t * t
            u, v = s * (1 - t * t) / d, s * 2 * t / d
            if self.rng.random() < 0.5:
                u, v = v, u
            point[a], point[b] = u, v
        for n in self.names:
            if n in point:
                continue
            r = self.rational()
            point[n] = r ** self.powers.get(n, 1)
        return point

    def sample(self) -> dict:
        for _ in range(self.max_rejections):
            p = self.draw()
            if in_domain(self.domain, p):
                return p
        raise SamplingError(f"no valid point after {self.max_rejections} draws; domain too restrictive")


@dataclass
class IdentityResult:
    holds: bool
    certificate: str
    witness: dict | None = None
    values: tuple | None = None
    points: int = 0
    exact: bool = True
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def _close(v1, v2, rel_tol: float) -> bool:
    if isinstance(v1, Fraction) and isinstance(v2, Fraction):
        return v1 == v2
    return abs(float(v1) - float(v2)) < rel_tol * (1 + abs(float(v1)))


def equal_identically(e1: Expr, e2: Expr, domain=(), trials: int = 20, seed: int = 0, *,
                      method: str = "auto", rel_tol: float = DEFAULT_REL_TOL,
                      fixed: Mapping | None = None, variables=()) -> IdentityResult:
    """Decide e1 == e2 on the domain.

    ``method="auto"`` returns a "symbolic" certificate when the normal form
    of the difference is zero and falls back to sampling otherwise;
    ``method="sampled"`` always samples.  ``variables`` adds symbols to the
    sampled point even when neither side depends on them (so witnesses are
    complete phase points).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    domain = parse_domain(domain)
    if isinstance(e2, (int, Fraction)):
        from .core import Const

        e2 = Const(e2)
    diff = to_poly(add(e1, neg(e2)))
    if method == "auto" and diff.is_zero():
        return IdentityResult(True, "symbolic")
    if method not in ("auto", "sampled"):
        raise ValueError(f"unknown method {method!r}")
    from .normal import export

    n1, n2 = export(to_poly(e1)), export(to_poly(e2))
    sampler = PointSampler([n1, n2], domain, seed=seed, fixed=fixed, variables=variables)
    exact = True
    done = 0
    rejections = 0
    while done < trials:
        p = sampler.sample()
        try:
            v1 = evaluate(n1, p)
            v2 = evaluate(n2, p)
        except EvaluationError:
            rejections += 1
            if rejections > sampler.max_rejections:
                raise SamplingError("evaluation failed at every sampled point") from None
            continue
        exact = exact and isinstance(v1, Fraction) and isinstance(v2, Fraction)
        if not _close(v1, v2, rel_tol):
            return IdentityResult(False, "refuted", witness=p, values=(v1, v2), points=done + 1,
                                  exact=exact)
        done += 1
    return IdentityResult(True, f"sampled({trials})", points=trials, exact=exact)
