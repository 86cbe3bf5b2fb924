"""Built-in implicit trajectory equations in the configuration plane.

Each equation is written in the symbols H, L, A (the values of the three
integrals) with the fixed parameter conventions m = omega = 1, alpha = 1,
delta = 1 and b = c = 1.
"""

from __future__ import annotations

from fractions import Fraction

from ..expr import parse, substitute

_CONSTANTS = ("H", "L", "A")

TRAJECTORY_EQUATIONS = {
    "harmonic-isotropic": (
        "L^2*(4*A*x*y - 2*H*(x^2 + y^2) + x^4 - 2*x^2*y^2 + y^4)"
        " + (A*(x^2 + y^2) - 2*H*x*y)^2 + L^4"
    ),
    "kepler": (
        "A^2*(x^2 + y^2) + 2*A*y*sqrt(x^2 + y^2) + L^4 + y^2"
        " - 2*L^2*(A*y + H*x^2 + sqrt(x^2 + y^2))"
    ),
    "fokas-lagerstrom": (
        "531441*A^4"
        " + (-729*x^2*(2*H - L)^3 + 216*L*y^4*(L - 2*H) + 729*L*y^2*(L - 2*H)^2 + 16*L*y^6)^2"
        " - 1458*A^2*(-216*y^4*(2*H - L)*(L - 2*x^2) + 729*y^2*(L - 2*H)^2*(L - 2*x^2)"
        " + 729*x^2*(2*H - L)^3 + 16*y^6*(L - 2*x^2))"
    ),
    "holt": (
        "A^4 + (L*(-2*H + L + 4*x^2)^2 - 8*y^2*(-2*H + L - 4)*(-2*H + L + 4))^2"
        " - 2*A^2*(L*(-2*H + L + 4*x^2)^2 - 8*y^2*(16*x^2*(L - 2*H) + (L - 2*H)^2 + 32*x^4 + 16))"
    ),
    "smorodinsky-winternitz": (
        "A^4 + 32*A^2*(L^2*(x^2*(-2*H + L + 2*x^2) + 2)"
        " + 2*y^4*(16*x^2*(L - 2*H) + (L - 2*H)^2 + 32*x^4 + 16)"
        " - L*y^2*(16*x^2*(L - 2*H) + (L - 2*H)^2 + 32*x^4 + 16))"
        " + 256*(L^2*(x^2*(-2*H + L + 2*x^2) + 2)"
        " - 2*y^4*(-2*H + L - 4)*(-2*H + L + 4) + L*y^2*(-2*H + L - 4)*(-2*H + L + 4))^2"
    ),
}

# parameter values the equations above assume
EQUATION_PARAMETERS = {
    "harmonic-isotropic": {"m": 1, "omega": 1},
    "kepler": {"alpha": 1},
    "fokas-lagerstrom": {},
    "holt": {"delta": 1},
    "smorodinsky-winternitz": {"b": 1, "c": 1},
}

# exclusions of the (x, y) plane for each equation
EQUATION_DOMAINS = {
    "harmonic-isotropic": (),
    "kepler": ("x^2+y^2 != 0",),
    "fokas-lagerstrom": (),
    "holt": ("x != 0",),
    "smorodinsky-winternitz": ("x != 0",),
}


class UnknownEquation(KeyError):
    pass


def builtin_trajectory_equation(name: str, constants):
    """The equation for ``name`` with (H, L, A) values substituted."""
    try:
        text = TRAJECTORY_EQUATIONS[name]
    except KeyError:
        raise UnknownEquation(
            f"no built-in trajectory equation for {name!r}; available: {', '.join(TRAJECTORY_EQUATIONS)}"
        ) from None
    E, l, a = (Fraction(c) for c in constants)
    template = parse(text, extra=_CONSTANTS)
    return substitute(template, {"H": E, "L": l, "A": a})


def equation_template(name: str):
    """The equation with H, L, A left symbolic."""
    return parse(TRAJECTORY_EQUATIONS[name], extra=_CONSTANTS)
