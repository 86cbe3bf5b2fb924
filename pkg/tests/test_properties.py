"""Property-based checks of the expression and bracket layers."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from superalg.expr import Const, evaluate, normalize, parse, to_string
from superalg.poisson import poisson_bracket

VARS = ("x", "y", "px", "py")

monomials = st.builds(
    lambda c, ex: (c, ex),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.tuples(*(st.integers(0, 3) for _ in VARS)),
)


def _poly_text(terms):
    parts = []
    for c, ex in terms:
        factors = [f"({c})"] + [f"{v}^{e}" for v, e in zip(VARS, ex) if e]
        parts.append("*".join(factors))
    return " + ".join(parts) or "0"


polys = st.lists(monomials, min_size=1, max_size=5).map(lambda t: parse(_poly_text(t)))
points = st.tuples(*(st.fractions(min_value=-4, max_value=4, max_denominator=9) for _ in VARS)).map(
    lambda v: dict(zip(VARS, v)))


@settings(max_examples=60, deadline=None)
@given(polys)
def test_normalize_is_idempotent(f):
    n = normalize(f)
    assert normalize(n) == n


@settings(max_examples=60, deadline=None)
@given(polys, points)
def test_printer_round_trip_preserves_values(f, p):
    assert evaluate(parse(to_string(f)), p) == evaluate(f, p)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_bracket_antisymmetry(f, g):
    assert normalize(poisson_bracket(f, g) + poisson_bracket(g, f)) == Const(0)


@settings(max_examples=25, deadline=None)
@given(polys, polys, polys)
def test_bracket_jacobi(f, g, h):
    j = (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
         + poisson_bracket(h, poisson_bracket(f, g)))
    assert normalize(j) == Const(0)


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_bracket_leibniz(f, g, h):
    lhs = poisson_bracket(f, g * h) - g * poisson_bracket(f, h) - poisson_bracket(f, g) * h
    assert normalize(lhs) == Const(0)


@settings(max_examples=40, deadline=None)
@given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=5).filter(lambda c: c != 0), polys)
def test_bracket_bilinear(f, c, g):
    lhs = poisson_bracket(Const(Fraction(c)) * f, g)
    assert normalize(lhs - Const(Fraction(c)) * poisson_bracket(f, g)) == Const(0)
