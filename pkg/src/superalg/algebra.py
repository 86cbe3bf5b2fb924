"""Polynomial Poisson algebra of integrals: k^2, G(H, L), {A,B} and its type.

Given integrals (H, L, A) the pipeline computes B = {L, A}, finds the
parameter-only constant k^2 with {L, B} = -k^2 A, fits the structure
polynomial G with B^2 + k^2 A^2 = G(H, L), and certifies the closure
{A, B} = -1/2 dG/dL.  Unknown coefficients are recovered by exact linear
algebra on sampled values; every fitted relation is then re-verified with
an identity test, so a fit is never trusted on its own.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .expr import (
    PHASE_VARS,
    Const,
    EvaluationError,
    Expr,
    PointSampler,
    SamplingError,
    Sym,
    derive_seed,
    equal_identically,
    evaluate,
    normalize,
    substitute,
    to_string,
)
from .expr.core import ZERO, add, mul, power
from .expr.normal import is_zero
from .poisson import is_integral, poisson_bracket

DEFAULT_DEGREE_BOUND = 8
RETRY_DEGREE_BOUND = 12
SAMPLED_TRIALS = 100
SYMBOLIC_TRIALS = 20
MAX_PARAM_DEGREE = 6


class AlgebraError(Exception):
    stage = "algebra"


class DegenerateInput(AlgebraError):
    stage = "detect_k2"


class NotProportional(AlgebraError):
    stage = "detect_k2"


class FitFailed(AlgebraError):
    stage = "fit_structure_G"


class ClosureViolation(AlgebraError):
    stage = "check_closure"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AnalysisError(AlgebraError):
    def __init__(self, system: str, stage: str, cause: Exception):
        self.system = system
        self.stage = stage
        self.cause = cause
        super().__init__(f"{system}: {stage} failed: {cause}")


# -- polynomials in the abstract symbols H and L --------------------------------

H_SYM, L_SYM = Sym("H"), Sym("L")


def hl_expr(poly: dict, H=H_SYM, L=L_SYM) -> Expr:
    """Sum of c_ij * H^i * L^j with H, L replaced by the given expressions."""
    return add(*(mul(c, power(H, i), power(L, j)) for (i, j), c in sorted(poly.items())))


def hl_diff_L(poly: dict) -> dict:
    out = {}
    for (i, j), c in poly.items():
        if j:
            out[(i, j - 1)] = normalize(mul(Const(j), c))
    return {k: v for k, v in out.items() if not is_zero(v)}


def hl_scale(poly: dict, s) -> dict:
    out = {k: normalize(mul(s, v)) for k, v in poly.items()}
    return {k: v for k, v in out.items() if not is_zero(v)}


def hl_degree(poly: dict) -> int:
    return max((i + j for i, j in poly), default=0)


def hl_string(poly: dict) -> str:
    return to_string(normalize(hl_expr(poly))) if poly else "0"


def hl_rows(poly: dict) -> list:
    """Deterministic [{i, j, coeff}] listing, highest total degree first."""
    keys = sorted(poly, key=lambda k: (-(k[0] + k[1]), -k[0]))
    return [{"i": i, "j": j, "coeff": to_string(poly[(i, j)])} for i, j in keys]


def hl_equal(p: dict, q: dict) -> bool:
    keys = set(p) | set(q)
    return all(is_zero(add(p.get(k, ZERO), mul(Const(-1), q.get(k, ZERO)))) for k in keys)


def classify(bracketAB: dict) -> str:
    """Type of the algebra from the total degree of {A,B} in (H, L)."""
    d = hl_degree(bracketAB)
    if d <= 1:
        return "linear"
    return {2: "quadratic", 3: "cubic"}.get(d, f"degree-{d}")


# -- exact / floating linear algebra --------------------------------------------


def _solve_exact(rows, rhs):
    """Solve an overdetermined system over Q.

    Returns (status, solution) where status is "ok", "inconsistent" or
    "deficient" (rank below the number of unknowns).
    """
    n = len(rows[0]) if rows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    if any(m[i][n] != 0 for i in range(r, len(m))):
        return "inconsistent", None
    if r < n:
        return "deficient", None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = m[i][n]
    return "ok", sol


def _solve_float(rows, rhs, rel_tol=1e-9):
    a = np.array(rows, dtype=float)
    b = np.array(rhs, dtype=float)
    scale = np.linalg.norm(a, axis=0)
    scale[scale == 0] = 1.0
    sol, _, rank, _ = np.linalg.lstsq(a / scale, b, rcond=None)
    if rank < a.shape[1]:
        return "deficient", None
    sol = sol / scale
    resid = np.abs(a @ sol - b)
    if np.max(resid) > rel_tol * (1 + np.max(np.abs(b))):
        return "inconsistent", None
    return "ok", [rationalize(v) for v in sol]


def rationalize(v, max_den: int = 10**6, zero_tol: float = 1e-7):
    if isinstance(v, Fraction):
        return v
    if abs(v) < zero_tol:
        return Fraction(0)
    return Fraction(v).limit_denominator(max_den)


def _solve(rows, rhs):
    exact = all(isinstance(v, Fraction) for r in rows for v in r) and all(isinstance(v, Fraction) for v in rhs)
    return _solve_exact(rows, rhs) if exact else _solve_float(rows, rhs)


# -- parameter handling ---------------------------------------------------------


def parameters_of(*exprs) -> list:
    names = set()
    for e in exprs:
        names |= e.free_symbols()
    return sorted(names - set(PHASE_VARS))


def _param_monomials(names, degree):
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(names, d):
            out.append(combo)
    return out


def _mono_value(combo, binding):
    v = Fraction(1)
    for n in combo:
        v *= binding[n]
    return v


def _random_binding(names, rng) -> dict:
    # positive values keep parameters that appear in denominators (e.g. m) valid
    return {n: Fraction(rng.randint(1, 40), rng.randint(1, 9)) for n in names}


def reconstruct(value_at, names, rng, max_degree: int = MAX_PARAM_DEGREE) -> dict:
    """Recover key -> polynomial-in-parameters from values at random bindings.

    ``value_at(binding)`` returns a dict key -> rational.  The parameter
    degree is raised until an exact fit also predicts two held-out bindings.
    """
    names = list(names)
    if not names:
        vals = value_at({})
        return {k: Const(v) for k, v in vals.items() if v}
    bindings, values = [], []
    for D in range(max_degree + 1):
        monos = _param_monomials(names, D)
        while len(bindings) < len(monos) + 2:
            b = _random_binding(names, rng)
            if b in bindings:  # repeated rows would make the held-out check vacuous
                continue
            bindings.append(b)
            values.append(value_at(b))
        keys = sorted(set().union(*values))
        rows = [[_mono_value(m, b) for m in monos] for b in bindings]
        result = {}
        ok = True
        for k in keys:
            rhs = [v.get(k, Fraction(0)) for v in values]
            status, sol = _solve(rows, rhs)
            if status != "ok":
                ok = False
                break
            coeff = add(*(mul(Const(c), *(Sym(n) for n in m)) for c, m in zip(sol, monos) if c))
            if not is_zero(coeff):
                result[k] = normalize(coeff)
        if ok:
            return result
    raise FitFailed(f"coefficients are not polynomials of degree <= {max_degree} in {', '.join(names)}")


# -- point pools ----------------------------------------------------------------


class _Pool:
    """Lazily sampled phase points with cached values of several expressions."""

    def __init__(self, exprs, domain, seed, binding, bounded=True):
        self.exprs = [substitute(e, binding) if binding else e for e in exprs]
        self.domain = tuple(_bind_constraint(c, binding) for c in domain)
        self.sampler = PointSampler(self.exprs, self.domain, seed=seed, num_range=12 if bounded else 50,
                                    variables=PHASE_VARS)
        if bounded:
            self.sampler.rational = self._small_rational
        self.rows: list = []

    def _small_rational(self):
        rng = self.sampler.rng
        d = rng.randint(1, 6)
        return Fraction(rng.randint(-2 * d, 2 * d), d)

    def get(self, n: int) -> list:
        tries = 0
        while len(self.rows) < n:
            p = self.sampler.sample()
            try:
                self.rows.append(tuple(evaluate(e, p) for e in self.exprs))
            except EvaluationError:
                tries += 1
                if tries > 1000:
                    raise SamplingError("could not evaluate at sampled points") from None
        return self.rows[:n]


def _bind_constraint(c, binding):
    if not binding:
        return c
    from .expr import Constraint

    return Constraint(substitute(c.expr, binding), c.op)


# -- pipeline stages ------------------------------------------------------------


def _method(*exprs) -> tuple:
    from .expr.core import is_polynomial_system

    if is_polynomial_system(*exprs):
        return "auto", SYMBOLIC_TRIALS
    return "sampled", SAMPLED_TRIALS


@dataclass
class K2Result:
    k2: Expr
    B: Expr
    LB: Expr
    certificate: str


def detect_k2(L: Expr, A: Expr, domain=(), seed: int = 0, *, method: str | None = None,
              trials: int | None = None, points: int = 6) -> K2Result:
    """Find k^2 (parameters only) with {L, {L, A}} = -k^2 A."""
    m, t = _method(L, A)
    method, trials = method or m, trials or t
    if is_zero(A):
        raise DegenerateInput("A is identically zero")
    B = poisson_bracket(L, A)
    LB = poisson_bracket(L, B)
    names = parameters_of(L, A)
    zero = equal_identically(LB, ZERO, domain, trials, derive_seed(seed, "k2-zero"), method=method,
                             variables=PHASE_VARS)
    if zero.holds:
        return K2Result(Const(0), B, LB, zero.certificate)
    rng = random.Random(derive_seed(seed, "k2-bindings"))
    counter = [0]

    def ratio_at(binding):
        counter[0] += 1
        pool = _Pool([LB, A], domain, derive_seed(seed, "k2-points", counter[0]), binding, bounded=False)
        ratios = []
        for lb, a in pool.get(points * 4):
            if a == 0:
                continue
            ratios.append(-lb / a)
            if len(ratios) == points:
                break
        if len(ratios) < 2:
            raise NotProportional("A vanishes at almost every sampled point")
        r0 = ratios[0]
        for r in ratios[1:]:
            if isinstance(r0, Fraction) and isinstance(r, Fraction):
                same = r == r0
            else:
                same = abs(float(r) - float(r0)) <= 1e-9 * (1 + abs(float(r0)))
            if not same:
                raise NotProportional(f"{{L,B}}/A is not constant: {float(r0):.6g} vs {float(r):.6g}")
        return {0: rationalize(r0) if not isinstance(r0, Fraction) else r0}

    fitted = reconstruct(ratio_at, names, rng, max_degree=2) if names else {
        k: Const(v) for k, v in ratio_at({}).items() if v}
    if not names and not fitted:
        raise NotProportional("{L,B}/A vanishes numerically but not identically")
    k2 = fitted.get(0, Const(0))
    check = equal_identically(add(LB, mul(k2, A)), ZERO, domain, trials, derive_seed(seed, "k2-verify"),
                              method=method, variables=PHASE_VARS)
    if not check.holds:
        raise NotProportional(f"{{L,B}} + ({k2})*A does not vanish at {check.witness}")
    return K2Result(k2, B, LB, check.certificate)


def fit_hl_polynomial(target: Expr, H: Expr, L: Expr, domain=(), seed: int = 0,
                      degree_bound: int = DEFAULT_DEGREE_BOUND, params=None) -> dict:
    """Fit target == P(H, L) with P of total degree <= degree_bound.

    Coefficients are polynomials in the free parameters, reconstructed from
    exact fits at random parameter bindings.
    """
    names = parameters_of(target, H, L) if params is None else list(params)
    rng = random.Random(derive_seed(seed, "fit-bindings"))
    degree = [None]
    counter = [0]

    def coeffs_at(binding):
        counter[0] += 1
        pool = _Pool([H, L, target], domain, derive_seed(seed, "fit-points", counter[0]), binding)
        start = 0 if degree[0] is None else degree[0]
        stop = degree_bound if degree[0] is None else degree[0]
        for d in range(start, stop + 1):
            monos = [(i, k - i) for k in range(d + 1) for i in range(k + 1)]
            n = 2 * len(monos)
            for _ in range(3):
                pts = pool.get(n)
                rows = [[h ** i * l ** j for i, j in monos] for h, l, _ in pts]
                status, sol = _solve(rows, [t for _, _, t in pts])
                if status != "deficient":
                    break
                n += len(monos)
            if status == "ok":
                degree[0] = d
                return {mono: c for mono, c in zip(monos, sol) if c}
        raise FitFailed(f"no polynomial of degree <= {degree_bound} in (H, L) matches")

    return reconstruct(coeffs_at, names, rng)


def fit_structure_G(A: Expr, B: Expr, k2: Expr, H: Expr, L: Expr, degree_bound: int = DEFAULT_DEGREE_BOUND,
                    domain=(), seed: int = 0, *, method: str | None = None, trials: int | None = None):
    """Fit G with B^2 + k^2 A^2 = G(H, L); returns (G, certificate)."""
    m, t = _method(A, B, H, L)
    method, trials = method or m, trials or t
    target = add(mul(B, B), mul(k2, A, A))
    G = None
    for bound in (degree_bound, max(degree_bound, RETRY_DEGREE_BOUND)):
        try:
            G = fit_hl_polynomial(target, H, L, domain, seed, bound)
            break
        except FitFailed:
            if bound >= RETRY_DEGREE_BOUND:
                raise
    res = equal_identically(target, hl_expr(G, H, L), domain, trials, derive_seed(seed, "G-verify"),
                            method=method, variables=PHASE_VARS)
    if not res.holds:
        raise FitFailed(f"fitted G = {hl_string(G)} disagrees with B^2 + k^2 A^2 at {res.witness}")
    return G, res.certificate


def check_closure(A: Expr, B: Expr, G: dict, H: Expr, L: Expr, domain=(), seed: int = 0, *,
                  method: str | None = None, trials: int | None = None):
    """Certify {A,B} = -1/2 dG/dL; returns (bracket polynomial, certificate)."""
    m, t = _method(A, B, H, L)
    method, trials = method or m, trials or t
    closure = hl_scale(hl_diff_L(G), Fraction(-1, 2))
    AB = poisson_bracket(A, B)
    res = equal_identically(AB, hl_expr(closure, H, L), domain, trials, derive_seed(seed, "closure"),
                            method=method, variables=PHASE_VARS)
    if not res.holds:
        raise ClosureViolation(f"{{A,B}} != -1/2 dG/dL at {res.witness}", res.witness)
    return closure, res.certificate


# -- the composed pipeline ------------------------------------------------------


@dataclass
class AlgebraReport:
    system: str
    k2: Expr
    B: Expr
    G: dict
    bracketAB: dict
    degree_label: str
    certificates: dict = field(default_factory=dict)
    table_label: str | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "system": self.system,
            "k2": to_string(self.k2),
            "B": to_string(self.B),
            "G": hl_rows(self.G),
            "G_expr": hl_string(self.G),
            "bracketAB": hl_rows(self.bracketAB),
            "bracketAB_expr": hl_string(self.bracketAB),
            "degree_label": self.degree_label,
            "certificates": dict(sorted(self.certificates.items())),
        }
        if self.table_label is not None:
            out["table_label"] = self.table_label
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _stage(sysname, stage, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except AlgebraError as err:
        raise AnalysisError(sysname, stage, err) from err
    except (SamplingError, EvaluationError) as err:
        raise AnalysisError(sysname, stage, err) from err


def analyze_system(sysdef, seed: int = 0, *, degree_bound: int = DEFAULT_DEGREE_BOUND,
                   check_integrals: bool = True) -> AlgebraReport:
    name = sysdef.name
    H, L, A, domain = sysdef.H, sysdef.L, sysdef.A, sysdef.domain
    method, trials = _method(H, L, A)
    certs = {}
    if check_integrals:
        for which, f in (("L", L), ("A", A)):
            res = _stage(name, "is_integral", is_integral, f, H, domain, derive_seed(seed, name, which),
                         trials=trials, method=method)
            if not res.holds:
                raise AnalysisError(name, "is_integral", ValueError(f"{which} is not an integral at {res.witness}"))
            certs[f"{{{which},H}}=0"] = res.certificate
    kr = _stage(name, "detect_k2", detect_k2, L, A, domain, derive_seed(seed, name, "k2"),
                method=method, trials=trials)
    certs["B={L,A}"] = "symbolic"
    certs["{L,B}+k2*A=0"] = kr.certificate
    G, cert = _stage(name, "fit_structure_G", fit_structure_G, A, kr.B, kr.k2, H, L, degree_bound, domain,
                     derive_seed(seed, name, "G"), method=method, trials=trials)
    certs["B^2+k2*A^2=G(H,L)"] = cert
    notes = []
    if is_zero(kr.k2):
        # B is a constant multiple of a Casimir-like quantity; {A,B} is fitted directly.
        AB = poisson_bracket(A, kr.B)
        bracket = _stage(name, "check_closure", fit_hl_polynomial, AB, H, L, domain,
                         derive_seed(seed, name, "AB"), degree_bound)
        res = equal_identically(AB, hl_expr(bracket, H, L), domain, trials, derive_seed(seed, name, "AB-verify"),
                                method=method, variables=PHASE_VARS)
        if not res.holds:
            raise AnalysisError(name, "check_closure", ClosureViolation("direct {A,B} fit failed", res.witness))
        certs["{A,B}=P(H,L)"] = res.certificate
        notes.append("k2 = 0: G = B^2 is constant; {A,B} fitted directly as a polynomial in (H, L)")
    else:
        bracket, cert = _stage(name, "check_closure", check_closure, A, kr.B, G, H, L, domain,
                               derive_seed(seed, name, "closure"), method=method, trials=trials)
        certs["{A,B}+1/2*dG/dL=0"] = cert
    return AlgebraReport(
        system=name,
        k2=kr.k2,
        B=kr.B,
        G=G,
        bracketAB=bracket,
        degree_label=classify(bracket),
        certificates=certs,
        table_label=sysdef.table_label,
        notes=notes,
    )


def compare_with_expected(report: AlgebraReport, expected) -> list:
    """List of human-readable mismatches between a report and expected data."""
    diffs = []
    if not is_zero(add(report.k2, mul(Const(-1), expected.k2))):
        diffs.append(f"k2: expected {to_string(expected.k2)}, derived {to_string(report.k2)}")
    for label, got, want in (("G", report.G, expected.G), ("bracketAB", report.bracketAB, expected.bracketAB)):
        for key in sorted(set(got) | set(want)):
            g = got.get(key, ZERO)
            w = want.get(key, ZERO)
            if not is_zero(add(g, mul(Const(-1), w))):
                diffs.append(f"{label}[H^{key[0]} L^{key[1]}]: expected {to_string(w)}, derived {to_string(g)}")
    if expected.B is not None and not is_zero(add(report.B, mul(Const(-1), expected.B))):
        diffs.append(f"B: expected {to_string(expected.B)}, derived {to_string(report.B)}")
    if expected.degree_label and expected.degree_label != report.degree_label:
        diffs.append(f"degree_label: expected {expected.degree_label}, derived {report.degree_label}")
    return diffs
