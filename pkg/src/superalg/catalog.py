"""The eight built-in superintegrable systems and JSON system definitions.

Each system is stored as a plain definition document (the same shape that
``load_system`` accepts) so built-ins and user files go through one code
path.  Parameters stay symbolic unless a value is bound explicitly in
``instantiate``; defaults are used by the numerical parts of the pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .expr import (
    PHASE_VARS,
    Constraint,
    Expr,
    ParseError,
    UnknownSymbolError,
    as_polynomial,
    normalize,
    parse,
    parse_domain,
    substitute,
    to_string,
)
from .expr.core import is_polynomial_system
from .poisson import is_integral, poisson_bracket

HL_SYMBOLS = ("H", "L")


class CatalogError(Exception):
    pass


class UnknownSystem(CatalogError, KeyError):
    pass


class MissingParameter(CatalogError, ValueError):
    pass


class SchemaError(CatalogError, ValueError):
    pass


class NotAnIntegral(CatalogError, ValueError):
    def __init__(self, which: str, witness: dict, values=None):
        self.which = which
        self.witness = witness
        self.values = values
        pts = ", ".join(f"{k}={v}" for k, v in sorted(witness.items()))
        super().__init__(f"{which} is not an integral of H: {{{which},H}} != 0 at ({pts})")


@dataclass(frozen=True)
class Expected:
    """Regression data: k2 and HL-polynomials keyed by (i, j) for H^i L^j."""

    k2: Expr
    G: dict
    bracketAB: dict
    degree_label: str
    B: Expr | None = None
    table_label: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class SystemDef:
    name: str
    H: Expr
    L: Expr
    A: Expr
    params: dict = field(default_factory=dict)  # free parameter -> default value
    domain: tuple = ()
    aux: dict = field(default_factory=dict)
    expected: Expected | None = None
    bound: dict = field(default_factory=dict)  # parameters substituted at instantiation
    title: str = ""
    table_label: str | None = None
    separable: bool = False

    @property
    def polynomial(self) -> bool:
        """True when no radicals or trig functions appear (symbolic certificates expected)."""
        return is_polynomial_system(self.H, self.L, self.A)

    def default_bindings(self) -> dict:
        return dict(self.params)

    def integrals(self) -> tuple:
        return (self.H, self.L, self.A)

    def singular_constraints(self) -> tuple:
        return tuple(c for c in self.domain if c.op == "!=")


def _hl(text: str, params) -> dict:
    """Parse a polynomial in H, L into {(i, j): coefficient}."""
    e = parse(text, params, extra=HL_SYMBOLS)
    return as_polynomial(e, HL_SYMBOLS)


# Table-1 order.  Expression strings use the parameter names listed.
_BUILTIN = [
    {
        "name": "harmonic-isotropic",
        "title": "Isotropic harmonic oscillator",
        "parameters": [["m", 1], ["omega", 1]],
        "hamiltonian": "(px^2 + py^2)/(2*m) + m*omega^2*(x^2 + y^2)/2",
        "L": "x*py - y*px",
        "A": "px*py + m^2*omega^2*x*y",
        "domain": [],
        "separable": True,
        "expected": {
            "k2": "4",
            "G": "4*m^2*H^2 - 4*omega^2*m^2*L^2",
            "bracketAB": "4*omega^2*m^2*L",
            "degree_label": "linear",
            "table_label": "Linear",
        },
    },
    {
        "name": "kepler",
        "title": "Kepler problem",
        "parameters": [["alpha", 1]],
        "hamiltonian": "(px^2 + py^2)/2 - alpha/sqrt(x^2 + y^2)",
        "L": "x*py - y*px",
        "A": "-(x*py - y*px)*px - alpha*y/sqrt(x^2 + y^2)",
        "domain": ["x^2+y^2 != 0"],
        "separable": True,
        "expected": {
            "k2": "1",
            "G": "alpha^2 + 2*L^2*H",
            "bracketAB": "-2*L*H",
            "degree_label": "quadratic",
            "table_label": "Quadratic",
        },
    },
    {
        "name": "fokas-lagerstrom",
        "title": "Fokas-Lagerstrom system",
        "parameters": [],
        "hamiltonian": "(px^2 + py^2)/2 + x^2/2 + y^2/18",
        "L": "px^2 + x^2",
        "A": "(x*py - y*px)*py^2 + y^3*px/27 - x*y^2*py/3",
        "domain": [],
        "separable": True,
        "expected": {
            "k2": "4",
            "G": "-4*L^4 + 32*H^3*L - 48*H^2*L^2 + 24*H*L^3",
            "bracketAB": "8*L^3 - 16*H^3 + 48*H^2*L - 36*H*L^2",
            "degree_label": "cubic",
            "table_label": "Cubic",
        },
    },
    {
        "name": "holt",
        "title": "Holt system",
        "parameters": [["delta", 1]],
        "hamiltonian": "(px^2 + py^2)/2 + (x^2 + 4*y^2) + delta/x^2",
        "L": "py^2 + 8*y^2",
        "A": "px^2*py + 8*x*y*px - 2*x^2*py + 2*delta*py/x^2",
        "domain": ["x != 0"],
        "separable": True,
        "expected": {
            "k2": "32",
            "G": "32*L*(2*H - L)^2 - 512*delta*L",
            "bracketAB": "-16*(2*H - L)^2 + 32*L*(2*H - L) + 256*delta",
            "degree_label": "quadratic",
            "table_label": "Quadratic",
        },
    },
    {
        "name": "smorodinsky-winternitz",
        "title": "Smorodinsky-Winternitz system",
        "parameters": [["b", 1], ["c", 1]],
        "hamiltonian": "(px^2 + py^2)/2 + b*(x^2 + y^2) + c/x^2",
        "aux": {
            "T": "py^2 + 2*b*y^2",
            "C": "x^2*py^2 + y^2*px^2 - 2*x*y*px*py + 2*c*y^2/x^2",
        },
        "L": "T",
        "A_bracket": ["T", "C"],
        "domain": ["x != 0"],
        "separable": True,
        "expected": {
            "k2": "32*b",
            "G": "256*((H - L/2)^2 - 4*b*c)*L^2",
            "bracketAB": "-256*((H - L/2)^2 - 4*b*c)*L + 128*(H - L/2)*L^2",
            "degree_label": "cubic",
            "table_label": "Cubic",
        },
    },
    {
        "name": "post-winternitz",
        "title": "Non-separable Post-Winternitz system",
        "parameters": [["alpha", 1]],
        "hamiltonian": "(px^2 + py^2)/2 + alpha*y/x^(2/3)",
        "L": "3*px^2*py + 2*py^3 + 9*alpha*x^(1/3)*px + 6*alpha*y/x^(2/3)*py",
        "A": "px^4 + 4*alpha*y/x^(2/3)*px^2 - 12*x^(1/3)*alpha*px*py - 2*alpha^2*(9*x^2 - 2*y^2)/x^(4/3)",
        "domain": ["x > 0"],
        "separable": True,
        "expected": {
            "k2": "0",
            "B": "108*alpha^3",
            "G": "11664*alpha^6",
            "bracketAB": "0",
            "degree_label": "linear",
            "table_label": "Linear",
            "note": "k2 = 0: G is the constant B^2 and {A,B} is computed directly",
        },
    },
    {
        "name": "trig-momentum",
        "title": "Hamiltonian trigonometric in the momenta",
        "parameters": [],
        "hamiltonian": "cos(y*py^2)",
        "L": "px",
        "A": "sin(x)*px^2*cos(y*py^2)^3",
        "domain": [],
        "separable": False,
        "expected": {
            "k2": "1",
            "G": "L^4*H^6",
            "bracketAB": "-2*L^3*H^6",
            "degree_label": "degree-9",
            "table_label": "Quadratic",
            "note": "Table 1 lists Quadratic; {A,B} has total degree 9 in (H, L)",
        },
    },
    {
        "name": "curved-oscillator",
        "title": "Harmonic oscillator on a space of constant curvature",
        "parameters": [["lambda", "1/10"], ["omega", 1]],
        "aux": {
            "pix": "px + lambda*x*(x*px + y*py)",
            "piy": "py + lambda*y*(x*px + y*py)",
        },
        "hamiltonian": "(pix^2 + piy^2 + lambda*(x*py - y*px)^2)/2 + omega^2*(x^2 + y^2)/2",
        "L": "x*py - y*px",
        "A": "((pix^2 + omega^2*x^2) - (piy^2 + omega^2*y^2))/2",
        "domain": [],
        "separable": False,
        "expected": {
            "k2": "4",
            "G": "(2*H - lambda*L^2)^2 - 4*omega^2*L^2",
            "bracketAB": "-2*lambda^2*L^3 + 4*lambda*H*L + 4*omega^2*L",
            "degree_label": "cubic",
            "table_label": "Quadratic",
            "note": (
                "A carries a factor 1/2 so that lambda=0 recovers the isotropic oscillator; "
                "the printed G = 4*lambda^2*L^4 - 16*lambda*H*L^2 - 4*omega^2*L^2 + 4*H^2 and "
                "{A,B} = -8*lambda^2*L^3 + 16*lambda*H*L + 4*omega^2*L do not satisfy B^2 + 4A^2 = G "
                "for any rescaling of A"
            ),
            "printed": {
                "G": "4*lambda^2*L^4 - 16*lambda*H*L^2 - 4*omega^2*L^2 + 4*H^2",
                "bracketAB": "-8*lambda^2*L^3 + 16*lambda*H*L + 4*omega^2*L",
            },
        },
    },
]

_BY_NAME = {d["name"]: d for d in _BUILTIN}

# Labels as printed in Table 1, for `list` and reporting.
TABLE_LABELS = {d["name"]: d["expected"]["table_label"] for d in _BUILTIN}


def builtin_systems() -> list:
    return [d["name"] for d in _BUILTIN]


def builtin_document(name: str) -> dict:
    try:
        return json.loads(json.dumps(_BY_NAME[name]))
    except KeyError:
        raise UnknownSystem(f"unknown system {name!r}; known: {', '.join(builtin_systems())}") from None


def printed_values(name: str) -> dict:
    """The (k2, G, {A,B}) strings exactly as printed for a built-in system."""
    exp = _BY_NAME[name]["expected"]
    out = {"k2": exp["k2"], "G": exp["G"], "bracketAB": exp["bracketAB"]}
    out.update(exp.get("printed", {}))
    return out


def _fraction(v) -> Fraction:
    try:
        return Fraction(str(v)) if not isinstance(v, Fraction) else v
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"parameter value {v!r} is not a rational number") from None


def _require(doc: Mapping, key: str, kind):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    if not isinstance(doc[key], kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return doc[key]


def _parse_field(text, params, aux_names, what):
    if not isinstance(text, str):
        raise SchemaError(f"{what} must be an expression string")
    try:
        return parse(text, params, extra=aux_names)
    except UnknownSymbolError as err:
        raise SchemaError(f"{what}: undeclared symbol {err.name!r}") from err


def _hl_map(value, params, what):
    """Expected polynomials may be an expression string or [[i, j, coeff], ...]."""
    if isinstance(value, str):
        try:
            return _hl(value, params)
        except UnknownSymbolError as err:
            raise SchemaError(f"{what}: undeclared symbol {err.name!r}") from err
    if not isinstance(value, list):
        raise SchemaError(f"{what} must be a string or a list of [i, j, coeff]")
    out = {}
    for item in value:
        if not (isinstance(item, list) and len(item) == 3):
            raise SchemaError(f"{what} entries must be [i, j, coeff]")
        i, j, c = item
        coeff = normalize(_parse_field(str(c), params, (), what))
        key = (int(i), int(j))
        out[key] = normalize(out[key] + coeff) if key in out else coeff
    return {k: v for k, v in out.items() if v != parse("0")}


def build_system(doc: Mapping, bindings: Mapping | None = None) -> SystemDef:
    """Materialize a definition document without checking integrality."""
    if not isinstance(doc, Mapping):
        raise SchemaError("system definition must be a JSON object")
    name = _require(doc, "name", str)
    raw_params = doc.get("parameters", [])
    if not isinstance(raw_params, list):
        raise SchemaError("parameters must be a list")
    params: dict = {}
    for p in raw_params:
        if isinstance(p, Mapping):
            pname, default = p.get("name"), p.get("default")
        elif isinstance(p, (list, tuple)) and len(p) == 2:
            pname, default = p
        else:
            raise SchemaError(f"bad parameter entry {p!r}")
        if not isinstance(pname, str) or not pname.isidentifier() or pname in PHASE_VARS + HL_SYMBOLS:
            raise SchemaError(f"bad parameter name {pname!r}")
        if default is None:
            raise SchemaError(f"parameter {pname!r} has no default")
        params[pname] = _fraction(default)
    bindings = dict(bindings or {})
    unknown = set(bindings) - set(params)
    if unknown:
        raise SchemaError(f"{name} has no parameter(s) {sorted(unknown)}")
    bound = {k: _fraction(v) for k, v in bindings.items()}
    free = {k: v for k, v in params.items() if k not in bound}
    names = tuple(params)

    aux_src = doc.get("aux") or {}
    if not isinstance(aux_src, Mapping):
        raise SchemaError("aux must be an object")
    aux: dict = {}
    for aname, text in aux_src.items():
        if not aname.isidentifier() or aname in PHASE_VARS + names:
            raise SchemaError(f"bad aux name {aname!r}")
        e = _parse_field(text, names, tuple(aux), f"aux {aname}")
        aux[aname] = substitute(e, aux)
    aux_names = tuple(aux)

    def field_expr(key):
        return substitute(_parse_field(_require(doc, key, str), names, aux_names, key), aux)

    H = field_expr("hamiltonian")
    L = field_expr("L")
    if "A_bracket" in doc:
        f, g = doc["A_bracket"]
        if f not in aux or g not in aux:
            raise SchemaError("A_bracket must name two aux expressions")
        A = poisson_bracket(aux[f], aux[g])
    else:
        A = field_expr("A")

    preds = doc.get("domain", [])
    if not isinstance(preds, list):
        raise SchemaError("domain must be a list of predicate strings")
    try:
        domain = parse_domain(preds, names)
    except (ValueError, ParseError) as err:
        raise SchemaError(str(err)) from err

    if bound:
        H, L, A = (substitute(e, bound) for e in (H, L, A))
        aux = {k: substitute(v, bound) for k, v in aux.items()}
        domain = tuple(Constraint(substitute(c.expr, bound), c.op) for c in domain)

    expected = None
    exp = doc.get("expected")
    if exp is not None:
        if not isinstance(exp, Mapping):
            raise SchemaError("expected must be an object")
        try:
            k2 = normalize(substitute(_parse_field(str(_require(exp, "k2", (str, int))), names, (), "k2"), bound))
            G = {k: normalize(substitute(v, bound)) for k, v in _hl_map(_require(exp, "G", (str, list)), names, "G").items()}
            AB = {k: normalize(substitute(v, bound))
                  for k, v in _hl_map(_require(exp, "bracketAB", (str, list)), names, "bracketAB").items()}
        except ParseError as err:
            raise SchemaError(f"expected: {err}") from err
        Bexp = None
        if "B" in exp:
            Bexp = normalize(substitute(_parse_field(exp["B"], names, (), "B"), bound))
        expected = Expected(
            k2=k2,
            G={k: v for k, v in G.items() if not _is_zero(v)},
            bracketAB={k: v for k, v in AB.items() if not _is_zero(v)},
            degree_label=exp.get("degree_label", ""),
            B=Bexp,
            table_label=exp.get("table_label"),
            note=exp.get("note"),
        )

    return SystemDef(
        name=name,
        H=H,
        L=L,
        A=A,
        params=free,
        domain=domain,
        aux=aux,
        expected=expected,
        bound=bound,
        title=doc.get("title", name),
        table_label=(exp or {}).get("table_label"),
        separable=bool(doc.get("separable", False)),
    )


def _is_zero(e: Expr) -> bool:
    from .expr import is_zero

    return is_zero(e)


def instantiate(name: str, params: Mapping | None = None, **kw) -> SystemDef:
    """Materialize a built-in system.

    Parameters named in ``params`` (or as keywords) are substituted by their
    values; all others stay symbolic and keep their default for numerics.
    """
    bindings = dict(params or {})
    bindings.update(kw)
    return build_system(builtin_document(name), bindings)


def load_system(document, *, seed: int = 0, trials: int = 20, check: bool = True,
                bindings: Mapping | None = None) -> SystemDef:
    """Build a SystemDef from a JSON string/object and verify L and A are integrals."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise SchemaError(f"invalid JSON: {err}") from err
    sysdef = build_system(document, bindings)
    if check:
        for which, f in (("L", sysdef.L), ("A", sysdef.A)):
            method = "auto" if sysdef.polynomial else "sampled"
            res = is_integral(f, sysdef.H, sysdef.domain, seed, trials=trials, method=method)
            if not res.holds:
                raise NotAnIntegral(which, res.witness, res.values)
    return sysdef


def system_document(sysdef: SystemDef) -> dict:
    """Serialize a SystemDef in the load_system schema (aux already inlined)."""
    doc = {
        "name": sysdef.name,
        "parameters": [{"name": k, "default": str(v)} for k, v in sysdef.params.items()],
        "hamiltonian": to_string(sysdef.H),
        "L": to_string(sysdef.L),
        "A": to_string(sysdef.A),
        "domain": [str(c) for c in sysdef.domain],
    }
    if sysdef.expected is not None:
        e = sysdef.expected

        def rows(m):
            return [[i, j, to_string(c)] for (i, j), c in sorted(m.items())]

        doc["expected"] = {
            "k2": to_string(e.k2),
            "G": rows(e.G),
            "bracketAB": rows(e.bracketAB),
            "degree_label": e.degree_label,
        }
    return doc
