"""Command-line interface: ``superalg <command> ...``.

Exit status: 0 on success, 1 when a validation mismatch or a numerical
failure occurs, 2 on usage errors (bad arguments, unknown systems).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import algebra, catalog, dynamics, trajectory
from .expr import ExprError, to_string

DEFAULT_SEED = 42
SEED_ENV = "SUPERALG_SEED"


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _fractions(text: str, count: int, what: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise UsageError(f"{what} needs {count} comma-separated values, got {text!r}")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what}: cannot read {text!r} as numbers") from None


def _params(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--param {name}: cannot read {value!r} as a number") from None
    return out


def _system(ref: str, params=None, seed: int = DEFAULT_SEED):
    """A built-in name or a path to a JSON system document."""
    path = Path(ref)
    if ref.endswith(".json") or (path.exists() and path.is_file()):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            raise UsageError(f"cannot read {ref}: {err}") from None
        return catalog.load_system(text, seed=seed, bindings=params or None)
    try:
        return catalog.instantiate(ref, params or None)
    except catalog.UnknownSystem as err:
        raise UsageError(str(err).strip("'\"")) from None


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# -- commands -------------------------------------------------------------------


def cmd_list(args) -> int:
    width = max(len(n) for n in catalog.builtin_systems())
    for name in catalog.builtin_systems():
        doc = catalog.builtin_document(name)
        print(f"{name:<{width}}  {catalog.TABLE_LABELS[name]:<9}  {doc['title']}")
    return 0


def cmd_analyze(args) -> int:
    sysdef = _system(args.system, _params(args.param), args.seed)
    report = algebra.analyze_system(sysdef, args.seed, degree_bound=args.degree_bound)
    _emit(report.to_json(), args.json)
    return 0


def cmd_validate(args) -> int:
    names = args.systems or catalog.builtin_systems()
    if args.all:
        names = catalog.builtin_systems()
    failed = 0
    for name in names:
        sysdef = _system(name, None, args.seed)
        if sysdef.expected is None:
            print(f"SKIP {name}: no expected data")
            continue
        try:
            report = algebra.analyze_system(sysdef, args.seed)
        except algebra.AnalysisError as err:
            failed += 1
            print(f"FAIL {name}: {err}")
            continue
        diffs = algebra.compare_with_expected(report, sysdef.expected)
        if diffs:
            failed += 1
            print(f"FAIL {name}")
            for d in diffs:
                print(f"  - {d}")
        else:
            print(f"PASS {name}  k2={to_string(report.k2)}  G={algebra.hl_string(report.G)}  "
                  f"{{A,B}}={algebra.hl_string(report.bracketAB)}  [{report.degree_label}]")
    print(f"{len(names) - failed}/{len(names)} systems match")
    return 1 if failed else 0


def cmd_trace(args) -> int:
    constants = _fractions(args.constants, 3, "--constants")
    window = tuple(float(v) for v in _fractions(args.window, 4, "--window"))
    if not (window[0] < window[1] and window[2] < window[3]):
        raise UsageError("--window must be x_min,x_max,y_min,y_max with min < max")
    if args.grid < 16:
        raise UsageError("--grid must be at least 16")
    try:
        eq = trajectory.builtin_trajectory_equation(args.system, constants)
    except trajectory.UnknownEquation as err:
        raise UsageError(err.args[0]) from None
    cs = trajectory.trace_curves(eq, window, args.grid, trajectory.EQUATION_DOMAINS[args.system])
    print(f"{args.system} {','.join(map(str, constants))}: {len(cs)} polylines, "
          f"{trajectory.components(cs)} connected components, {cs.n_vertices()} vertices, "
          f"max residual {cs.residual_stats['max']:.2e}", file=sys.stderr)
    if cs.empty:
        print("EmptyCurve: no sign change in the window", file=sys.stderr)
    if args.csv:
        _emit(trajectory.curves_to_csv(cs), args.csv)
    else:
        title = f"{args.system} H={constants[0]} L={constants[1]} A={constants[2]}"
        svg = trajectory.curves_to_svg(cs, title=title)
        _emit(svg, args.svg)
    return 0


def cmd_eliminate(args) -> int:
    constants = _fractions(args.constants, 3, "--constants")
    sysdef = _system(args.system, _params(args.param), args.seed)
    try:
        el = trajectory.eliminate_momenta(sysdef, constants)
    except trajectory.EliminationError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    for note in el.notes:
        print(f"note: {note}", file=sys.stderr)
    for f in el.rejected:
        print(f"rejected factor: {to_string(f)}", file=sys.stderr)
    _emit(to_string(el.equation) + " = 0\n", args.out)
    return 0


def cmd_integrate(args) -> int:
    ic = _fractions(args.ic, 4, "--ic")
    sysdef = _system(args.system, _params(args.param), args.seed)
    try:
        tr = dynamics.integrate(sysdef, ic, args.t_end, args.dt, args.method)
    except dynamics.NotSeparable as err:
        raise UsageError(str(err)) from None
    except dynamics.DynamicsError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    E, l, a = tr.integrals_at_start
    print(f"{sysdef.name}: {len(tr)} samples, t_end={tr.t[-1]:g}, method={tr.method}")
    print(f"constants: H={E:.15g} L={l:.15g} A={a:.15g}")
    print("drift: " + " ".join(f"{k}={v:.3e}" for k, v in tr.drift.items()))
    if args.csv:
        tr.to_csv(args.csv)
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="superalg",
        description="Polynomial algebras of integrals for 2D superintegrable systems.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def seeded(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help=f"random seed for identity testing (default {DEFAULT_SEED} or ${SEED_ENV})")
        return sp

    def with_params(sp):
        sp.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="fix a system parameter (repeatable)")
        return sp

    s = sub.add_parser("list", help="catalog identifiers and Table-1 labels")
    s.set_defaults(func=cmd_list)

    s = with_params(seeded(sub.add_parser("analyze", help="derive the algebra of a system")))
    s.add_argument("system", help="built-in name or JSON system document")
    s.add_argument("--json", metavar="OUT", help="write the report here (default stdout)")
    s.add_argument("--degree-bound", type=int, default=algebra.DEFAULT_DEGREE_BOUND)
    s.set_defaults(func=cmd_analyze)

    s = seeded(sub.add_parser("validate", help="regression against the expected catalog data"))
    s.add_argument("systems", nargs="*", help="systems to check (default: all)")
    s.add_argument("--all", action="store_true", help="check every built-in system")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("trace", help="trace a built-in trajectory equation")
    s.add_argument("system", choices=sorted(trajectory.TRAJECTORY_EQUATIONS))
    s.add_argument("--constants", required=True, metavar="E,l,a")
    s.add_argument("--window", default="-5,5,-5,5", metavar="XMIN,XMAX,YMIN,YMAX")
    s.add_argument("--grid", type=int, default=128)
    out = s.add_mutually_exclusive_group()
    out.add_argument("--csv", metavar="OUT", help="vertex table (use - for stdout)")
    out.add_argument("--svg", metavar="OUT", help="SVG drawing (default: stdout)")
    s.set_defaults(func=cmd_trace)

    s = with_params(seeded(sub.add_parser("eliminate", help="eliminate the momenta by resultants")))
    s.add_argument("system")
    s.add_argument("--constants", required=True, metavar="E,l,a")
    s.add_argument("--out", metavar="FILE")
    s.set_defaults(func=cmd_eliminate)

    s = with_params(seeded(sub.add_parser("integrate", help="integrate Hamilton's equations")))
    s.add_argument("system")
    s.add_argument("--ic", required=True, metavar="x,y,px,py")
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--dt", type=float, required=True)
    s.add_argument("--method", choices=("rk4", "leapfrog"), default="rk4")
    s.add_argument("--csv", metavar="OUT")
    s.set_defaults(func=cmd_integrate)
    return p


_LIST_OPTIONS = ("--constants", "--ic", "--window")


def _join_negative_values(argv):
    """Let list options take values starting with '-' (e.g. --constants -1/10,0,1/10)."""
    out = []
    it = iter(argv)
    for arg in it:
        if arg in _LIST_OPTIONS:
            value = next(it, None)
            out.append(arg if value is None else f"{arg}={value}")
        else:
            out.append(arg)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        if getattr(args, "seed", None) is None:
            args.seed = default_seed()
        return args.func(args)
    except UsageError as err:
        print(f"superalg {args.command}: error: {err}", file=sys.stderr)
        return 2
    except (catalog.CatalogError, ExprError, json.JSONDecodeError) as err:
        print(f"superalg {args.command}: error: {err}", file=sys.stderr)
        return 2
    except algebra.AnalysisError as err:
        print(f"superalg {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
