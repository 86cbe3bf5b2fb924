import csv
import io
import math
import random
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from superalg.catalog import instantiate
from superalg.dynamics import constants_of, integrate
from superalg.expr import Const, evaluate, lambdify, normalize, parse
from superalg.trajectory import (
    EQUATION_DOMAINS,
    EmptyCurve,
    NotEliminable,
    UnknownEquation,
    bareiss_determinant,
    builtin_trajectory_equation,
    component_labels,
    components,
    curves_to_csv,
    curves_to_svg,
    eliminate_momenta,
    resultant,
    sylvester_matrix,
    trace_curves,
    zero_crossings,
)

P = Fraction


def value(eq, x, y):
    return evaluate(eq, {"x": x, "y": y}, floating=True)


# -- built-in equations -----------------------------------------------------------


def test_oscillator_unit_circle():
    eq = builtin_trajectory_equation("harmonic-isotropic", (1, 1, 0))
    assert normalize(eq) == normalize(parse("(x^2 + y^2 - 1)^2"))
    for t in np.linspace(0, 2 * math.pi, 13):
        assert abs(value(eq, math.cos(t), math.sin(t))) < 1e-12


def test_oscillator_degenerate_axes():
    eq = builtin_trajectory_equation("harmonic-isotropic", (10, 0, 0))
    assert evaluate(eq, {"x": P(1, 2), "y": P(0)}) == 0
    assert normalize(eq) == normalize(parse("400*x^2*y^2"))


def test_kepler_circular_orbit():
    eq = builtin_trajectory_equation("kepler", (P(-1, 2), 1, 0))
    assert evaluate(eq, {"x": P(1), "y": P(0)}) == 0
    for t in np.linspace(0, 2 * math.pi, 9):
        assert abs(value(eq, math.cos(t), math.sin(t))) < 1e-12


def test_unknown_trajectory_equation():
    with pytest.raises(UnknownEquation):
        builtin_trajectory_equation("trig-momentum", (1, 1, 1))


@pytest.mark.parametrize("name,params", [
    ("harmonic-isotropic", {"m": 1, "omega": 1}),
    ("kepler", {"alpha": 1}),
    ("fokas-lagerstrom", {}),
    ("holt", {"delta": 1}),
    ("smorodinsky-winternitz", {"b": 1, "c": 1}),
])
def test_integrated_orbits_satisfy_builtin_equations(name, params):
    from superalg.dynamics import sample_initial_conditions

    s = instantiate(name, params)
    ic = sample_initial_conditions(instantiate(name), 1, seed=1, screen_t=5)[0]
    E, l, a = constants_of(s, ic)
    eq = builtin_trajectory_equation(name, (E, l, a))
    f = lambdify(eq, ["x", "y"], backend="math")
    terms = [lambdify(t, ["x", "y"], backend="math") for t in _monomials(eq)]
    tr = integrate(s, ic, 5.0, 1e-3)
    for x, y in tr.states[::50, :2]:
        scale = 1 + max(abs(t(x, y)) for t in terms)
        assert abs(f(x, y)) < 1e-6 * scale


def _monomials(eq):
    from superalg.expr import Add

    e = normalize(eq)
    return list(e.terms) if isinstance(e, Add) else [e]


# -- resultants -------------------------------------------------------------------

X, Y, Z = sp.symbols("x y z")


@pytest.mark.parametrize("f,g", [
    (X**2 + Y**2 - 1, X - Y),
    (X**3 * Y + 2 * X - Y**2, X**2 * Y - 3 * X + 1),
    (Z * X**2 + Y * X + 1, X**3 - Z),
    (X**2 - 2, X**2 - 2),
])
def test_resultant_matches_sympy(f, g):
    gens = sorted(f.free_symbols | g.free_symbols, key=str)
    pf, pg = sp.Poly(f, *gens, domain="QQ"), sp.Poly(g, *gens, domain="QQ")
    mine = resultant(pf, pg, X)
    ref = sp.resultant(f, g, X)
    got = mine.as_expr() if hasattr(mine, "as_expr") else mine
    assert sp.expand(got - ref) == 0


def test_sylvester_matrix_shape():
    pf = sp.Poly(X**2 + Y, X, Y)
    pg = sp.Poly(X**3 - 1, X, Y)
    m = sylvester_matrix(pf, pg, X)
    assert len(m) == 5 and all(len(r) == 5 for r in m)


def test_bareiss_on_integer_matrix():
    rows = [[3, 1, 4], [1, 5, 9], [2, 6, 5]]
    M = [[sp.Poly(v, Y, domain="QQ") for v in r] for r in rows]
    assert bareiss_determinant(M).as_expr() == sp.Matrix(rows).det()


# -- elimination ------------------------------------------------------------------


def test_eliminate_oscillator_contains_unit_circle():
    el = eliminate_momenta(instantiate("harmonic-isotropic"), (1, 1, 0))
    for t in np.linspace(0, 2 * math.pi, 17):
        assert abs(value(el.equation, math.cos(t), math.sin(t))) < 1e-9
    assert any(normalize(f) == normalize(parse("x^2 + y^2 - 1")) for f in el.factors)


def test_eliminate_fokas_matches_builtin_zero_set():
    s = instantiate("fokas-lagerstrom")
    c = (P(3, 2), 2, 1)
    el = eliminate_momenta(s, c)
    tr = builtin_trajectory_equation("fokas-lagerstrom", c)
    pts = zero_crossings(tr, (-3, 3, -3, 3), 64, limit=50)
    assert len(pts) >= 20
    f = lambdify(el.equation, ["x", "y"], backend="math")
    terms = [lambdify(t, ["x", "y"], backend="math") for t in _monomials(el.equation)]
    for x, y in pts:
        assert abs(f(x, y)) <= 1e-6 * (1 + max(abs(t(x, y)) for t in terms))


def test_eliminate_kepler_uses_radius():
    el = eliminate_momenta(instantiate("kepler"), (P(-1, 2), 1, 0))
    assert "sqrt" in str(el.equation) or "u" in str(el.equation)
    for t in np.linspace(0.1, 6, 7):
        x, y = math.cos(t), math.sin(t)
        assert abs(value(el.equation, x, y)) < 1e-8


def test_trig_momentum_not_eliminable():
    with pytest.raises(NotEliminable):
        eliminate_momenta(instantiate("trig-momentum"), (P(1, 2), 1, P(1, 3)))


def test_eliminated_equation_is_squarefree():
    el = eliminate_momenta(instantiate("holt"), (5, 2, 1))
    for f in el.factors:
        sf = sp.sympify(str(f).replace("^", "**"))
        assert sp.degree(sp.gcd(sf, sp.diff(sf, sp.Symbol("x")))) == 0 or \
            sp.gcd(sf, sp.diff(sf, sp.Symbol("y"))).is_number


# -- tracing ----------------------------------------------------------------------


def test_trace_unit_circle():
    eq = builtin_trajectory_equation("harmonic-isotropic", (1, 1, 0))
    cs = trace_curves(eq, (-2, 2, -2, 2), 64)
    assert len(cs) == 1 and cs.closed == [True]
    r = np.hypot(cs.curves[0][:, 0], cs.curves[0][:, 1])
    assert np.max(np.abs(r - 1)) < 1e-8
    assert cs.residual_stats["max"] < 1e-9


def test_trace_vertices_inside_window():
    eq = builtin_trajectory_equation("harmonic-isotropic", (10, 2, 3))
    cs = trace_curves(eq, (-5, 5, -4, 4), 96)
    for c in cs.curves:
        assert np.all((c[:, 0] >= -5) & (c[:, 0] <= 5) & (c[:, 1] >= -4) & (c[:, 1] <= 4))


def test_trace_empty_window_is_reported():
    eq = builtin_trajectory_equation("harmonic-isotropic", (1, 1, 0))
    cs = trace_curves(eq, (3, 4, 3, 4), 32)
    assert cs.empty and any("EmptyCurve" in n for n in cs.notes)
    with pytest.raises(EmptyCurve):
        trace_curves(eq, (3, 4, 3, 4), 32, strict=True)


def test_trace_rejects_small_grid():
    with pytest.raises(ValueError):
        trace_curves(parse("x^2 + y^2 - 1"), (-2, 2, -2, 2), 8)


def test_trace_skips_excluded_line():
    eq = builtin_trajectory_equation("holt", (4, 2, 2))
    cs = trace_curves(eq, (-5, 5, -5, 5), 128, EQUATION_DOMAINS["holt"])
    assert not cs.empty
    for c in cs.curves:
        assert np.all(np.abs(c[:, 0]) > 1e-3)


@pytest.mark.parametrize("name,constants,window", [
    ("harmonic-isotropic", (10, 2, 3), (-5, 5, -5, 5)),
    ("harmonic-isotropic", (10, 3, 0), (-5, 5, -5, 5)),
    ("kepler", (P(-1, 10), 0, P(1, 10)), (-12, 12, -12, 12)),
    ("fokas-lagerstrom", (P(3, 2), 2, 1), (-3, 3, -3, 3)),
    ("holt", (4, 2, 2), (-3, 3, -3, 3)),
])
def test_components_stable_under_refinement(name, constants, window):
    eq = builtin_trajectory_equation(name, constants)
    dom = EQUATION_DOMAINS[name]
    counts = {components(trace_curves(eq, window, n, dom)) for n in (128, 256)}
    assert len(counts) == 1


def test_component_labels_cover_all_curves():
    eq = builtin_trajectory_equation("harmonic-isotropic", (10, 2, 3))
    cs = trace_curves(eq, (-5, 5, -5, 5), 128)
    labels = component_labels(cs)
    assert len(labels) == len(cs)


# -- export -----------------------------------------------------------------------


def test_csv_export_columns_and_rows():
    eq = builtin_trajectory_equation("harmonic-isotropic", (1, 1, 0))
    cs = trace_curves(eq, (-2, 2, -2, 2), 32)
    rows = list(csv.reader(io.StringIO(curves_to_csv(cs))))
    assert rows[0] == ["curve_id", "vertex_index", "x", "y", "residual"]
    assert len(rows) - 1 == cs.n_vertices()
    for cid, k, x, y, r in rows[1:]:
        assert abs(math.hypot(float(x), float(y)) - 1) < 1e-6 and float(r) < 1e-9


def test_svg_export_one_path_per_curve(tmp_path):
    eq = builtin_trajectory_equation("harmonic-isotropic", (10, 2, 3))
    cs = trace_curves(eq, (-5, 5, -5, 5), 64)
    out = tmp_path / "c.svg"
    text = curves_to_svg(cs, out, title="a < b")
    assert out.read_text() == text
    root = ET.fromstring(text)
    assert root.get("width") == "800" and root.get("height") == "800"
    paths = root.findall("{http://www.w3.org/2000/svg}path")
    assert len(paths) == len(cs)
    for p in paths:
        coords = [float(v) for v in p.get("d").replace("M", " ").replace("L", " ").replace("Z", " ")
                  .replace(",", " ").split()]
        assert all(0 <= v <= 800 for v in coords)
