"""``hconv`` entry point.

Exit codes: 0 success, 2 a certified check failed, 3 construction error,
4 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from ..errors import ExpressionError, HconvError
from ..families import (
    FAMILIES,
    build_family,
    candidate_convolvers,
    convolver_by_name,
    dilatation_catalog,
    parse_omega,
    phi_beta_status,
)
from ..harmonic import (
    ConeParams,
    HarmonicMap,
    analytic_prefunction,
    cis,
    shear_construct,
)
from ..series import TruncatedSeries, default_order
from ..verifiers import (
    SamplingGrid,
    convexity_check,
    direction_convexity_boundary_check,
    eq2_cone_check,
    eq3_lattice_check,
    eq3_nonvanishing_check,
    halfplane_check,
    local_univalence_check,
    radial_extremum_check,
    theorem_a_check,
    typically_real_check,
)
from .expr import evaluate_expression, parse_angle
from .plot import PlotSpec, write_svg
from .presets import PRESETS, default_r_max, resolve_params, run_preset, write_bundle

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_CONSTRUCTION = 3
EXIT_PARSE = 4

CHECKS = (
    "theorem_a",
    "eq2",
    "eq3",
    "local_univalence",
    "typically_real",
    "convexity",
    "direction_convexity",
    "halfplane",
    "radial_extremum",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ExpressionError as exc:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}: {exc}") from None


def _unit(text: str) -> complex:
    """A unit complex number: ``-1``, ``1j``, ``0.6+0.8j`` or ``cis(<angle>)``."""
    t = text.strip()
    if t.startswith("cis(") and t.endswith(")"):
        return cis(_angle(t[4:-1]))
    try:
        value = complex(t.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad unit complex number {text!r}") from None
    if abs(abs(value) - 1) > 1e-12:
        raise argparse.ArgumentTypeError(f"{text!r} does not have modulus 1")
    return value


def _grid_args(p: argparse.ArgumentParser, r_max_default):
    p.add_argument("--r-max", type=float, default=r_max_default, help="outermost grid radius")
    p.add_argument("--step", type=float, default=0.05, help="ring spacing")
    p.add_argument("--angles", type=int, default=512, help="angles per ring")
    p.add_argument("--margin", type=float, default=1e-9, help="certification margin")


def _make_grid(args, r_max: float) -> SamplingGrid:
    base = SamplingGrid.default(r_max=r_max, step=args.step, angles=args.angles)
    return SamplingGrid(base.radii, base.angles_per_ring, margin=args.margin)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hconv", description="Convolutions of harmonic maps convex in one direction.")
    parser.add_argument("--order", type=int, default=None, help="truncation order N (default HCONV_ORDER or 256)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fam = sub.add_parser("families", help="list families, convolvers and dilatations")
    fam.add_argument("--json", action="store_true", help="machine-readable output")

    ver = sub.add_parser("verify", help="run one check on an expression")
    ver.add_argument("--expr", required=True, help='e.g. "shear(f_alpha(0.5), omega=z, gamma=pi/2)"')
    ver.add_argument("--check", required=True, choices=CHECKS)
    ver.add_argument("--gamma", type=_angle, help="direction angle (default: from the expression, else pi/2)")
    ver.add_argument("--eta", type=_unit, default=-1 + 0j)
    ver.add_argument("--xi", type=_unit, default=1 + 0j)
    ver.add_argument("--phi", default="identity", help="convolver for eq3: identity, linear, strip, phi_beta")
    ver.add_argument("--phi-beta", type=float, default=0.0, help="beta of phi_beta when --phi phi_beta")
    ver.add_argument("--beta", type=_unit, help="eq3 lattice point beta (with --sigma); default: 8x8 lattice")
    ver.add_argument("--sigma", type=_unit)
    ver.add_argument("--r", type=float, help="circle radius for direction_convexity (default r-max)")
    ver.add_argument("--samples", type=int, default=1024)
    _grid_args(ver, 0.9)
    ver.add_argument("--out", type=Path, help="report path (default: stdout)")

    rep = sub.add_parser("reproduce", help="run a reproduction preset")
    rep.add_argument("--item", required=True, choices=sorted(PRESETS))
    rep.add_argument("--family", choices=sorted(FAMILIES))
    rep.add_argument("--alpha", type=_angle)
    rep.add_argument("--beta", type=_angle)
    rep.add_argument("--theta", type=_angle)
    rep.add_argument("--slant", type=_angle)
    rep.add_argument("--omega")
    rep.add_argument("--phi", choices=[c.name for c in candidate_convolvers(order=1)])
    _grid_args(rep, None)
    rep.add_argument("--out-dir", type=Path, help="report directory (default reports/<item>)")

    plo = sub.add_parser("plot", help="SVG of image circles and spokes")
    src = plo.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr")
    src.add_argument("--family", choices=sorted(FAMILIES))
    plo.add_argument("--alpha", type=_angle, default=0.5)
    plo.add_argument("--beta", type=_angle, default=0.0)
    plo.add_argument("--theta", type=_angle, default=math.pi / 2)
    plo.add_argument("--slant", type=_angle, default=math.pi / 4)
    plo.add_argument("--omega", help="shear the family with this dilatation")
    plo.add_argument("--gamma", type=_angle, help="direction of the reference arrow and of the shear")
    plo.add_argument("--rings", type=int, default=8)
    plo.add_argument("--spokes", type=int, default=16)
    plo.add_argument("--r-max", type=float, default=0.9)
    plo.add_argument("--points", type=int, default=512)
    plo.add_argument("--out", type=Path, default=Path("plot.svg"))
    return parser


def _families_catalog(order: int) -> dict:
    families = [
        {"name": info.name, "parameter": info.parameter, "domain": info.domain, "formula": info.formula}
        for info in FAMILIES.values()
    ]
    convolvers = [
        {"name": c.name, "status": c.status.value}
        for c in candidate_convolvers(order=order)
        if c.name != "phi_beta"
    ]
    convolvers += [
        {"name": "phi_beta", "beta": "-1 or 1", "status": phi_beta_status(1.0).value},
        {"name": "phi_beta", "beta": "(-1, 1)", "status": phi_beta_status(0.0).value},
    ]
    dilatations = [{"name": name, "omega(0)": [s[0].real, s[0].imag]} for name, s in dilatation_catalog(order)]
    return {"families": families, "convolvers": convolvers, "dilatations": dilatations}


def cmd_families(args, order: int) -> int:
    cat = _families_catalog(order)
    if args.json:
        print(json.dumps(cat, indent=2))
        return EXIT_OK
    print("families:")
    for f in cat["families"]:
        param = f"{f['parameter']} in {f['domain']}" if f["parameter"] else "no parameter"
        print(f"  {f['name']:<12} {param:<32} {f['formula']}")
    print("convolvers:")
    for c in cat["convolvers"]:
        extra = f" (beta {c['beta']})" if "beta" in c else ""
        print(f"  {c['name'] + extra:<28} {c['status']}")
    print("dilatations:")
    for d in cat["dilatations"]:
        print(f"  {d['name']}")
    return EXIT_OK


def _as_series(value, gamma: float) -> TruncatedSeries:
    return analytic_prefunction(value, gamma) if isinstance(value, HarmonicMap) else value


def _as_map(value) -> HarmonicMap:
    return value if isinstance(value, HarmonicMap) else HarmonicMap.analytic(value)


def _run_check(args, value, gamma: float, grid: SamplingGrid, order: int):
    check = args.check
    if check == "theorem_a":
        return theorem_a_check(_as_series(value, gamma), grid)
    if check == "eq2":
        return eq2_cone_check(value, ConeParams(args.eta, args.xi, gamma), grid)
    if check == "eq3":
        phi = convolver_by_name(args.phi, beta=args.phi_beta, order=order).series
        if (args.beta is None) != (args.sigma is None):
            raise _UsageError("--beta and --sigma go together")
        if args.beta is not None:
            return eq3_nonvanishing_check(phi, value, gamma, args.beta, args.sigma, grid)
        return eq3_lattice_check(phi, value, gamma, grid)[0]
    if check == "local_univalence":
        return local_univalence_check(_as_map(value), grid)
    if check == "typically_real":
        return typically_real_check(_as_series(value, gamma), grid)
    if check == "convexity":
        return convexity_check(_as_series(value, gamma), grid)
    if check == "direction_convexity":
        r = grid.r_max if args.r is None else args.r
        return direction_convexity_boundary_check(value, gamma, r, args.samples)
    if check == "halfplane":
        return halfplane_check(_as_map(value), gamma, grid)
    return radial_extremum_check(_as_series(value, gamma), grid)


def cmd_verify(args, order: int) -> int:
    try:
        ev = evaluate_expression(args.expr, order)
    except ExpressionError as exc:
        _report_expression_error(args.expr, exc)
        return EXIT_PARSE
    if isinstance(ev.value, float):
        print("hconv: expression is a number, not a function", file=sys.stderr)
        return EXIT_PARSE
    gamma = args.gamma if args.gamma is not None else (ev.gamma if ev.gamma is not None else math.pi / 2)
    report = _run_check(args, ev.value, gamma, _make_grid(args, args.r_max), order)
    body = report.to_dict()
    body["expression"] = args.expr
    body["order"] = order
    text = json.dumps(body, indent=2) + "\n"
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed or report.heuristic else EXIT_CHECK_FAILED


def cmd_reproduce(args, order: int) -> int:
    overrides = {
        key: getattr(args, key)
        for key in ("family", "alpha", "beta", "theta", "slant", "omega", "phi")
        if getattr(args, key) is not None
    }
    try:
        params = resolve_params(args.item, overrides)
    except KeyError as exc:
        raise _UsageError(str(exc.args[0])) from None
    r_max = args.r_max if args.r_max is not None else default_r_max(args.item, params)
    grid = _make_grid(args, r_max)
    result = run_preset(args.item, overrides, grid, order)
    out_dir = args.out_dir or Path("reports") / args.item
    write_bundle(result, out_dir)
    for row in result.bundle["checks"]:
        flag = "pass" if row["pass"] else "FAIL"
        print(f"  [{row['category']:<11}] {row['key']:<42} {flag}  extremal={row['extremal_value']}")
    verdict = result.bundle["verdict"]
    print(f"{args.item}: {verdict['status']}: {verdict['conclusion']}")
    print(f"reports written to {out_dir}")
    return result.exit_code


def cmd_plot(args, order: int) -> int:
    gamma = args.gamma
    if args.expr:
        try:
            ev = evaluate_expression(args.expr, order)
        except ExpressionError as exc:
            _report_expression_error(args.expr, exc)
            return EXIT_PARSE
        f = ev.value
        if isinstance(f, float):
            raise _UsageError("expression is a number, not a function")
        title = args.expr
        if gamma is None:
            gamma = ev.gamma
    else:
        key = {"f_alpha": "alpha", "f_theta": "theta", "slanted": "slant", "phi_beta": "beta"}.get(args.family)
        F = build_family(args.family, getattr(args, key) if key else None, order)
        f = F
        title = args.family + (f"({getattr(args, key)!r})" if key else "")
        if args.omega:
            g = math.pi / 2 if gamma is None else gamma
            f = shear_construct(F, parse_omega(args.omega, order), g)
            title = f"shear({title}, omega={args.omega}, gamma={g!r})"
    spec = PlotSpec(args.rings, args.spokes, args.r_max, args.points, math.pi / 2 if gamma is None else gamma)
    path = write_svg(f, spec, args.out, title)
    print(f"wrote {path}")
    return EXIT_OK


def _report_expression_error(text: str, exc: ExpressionError):
    print(f"hconv: parse error: {exc}", file=sys.stderr)
    if exc.position is not None:
        print(f"  {text}", file=sys.stderr)
        print(f"  {' ' * exc.position}^", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    try:
        order = args.order if args.order is not None else default_order()
        handler = {
            "families": cmd_families,
            "verify": cmd_verify,
            "reproduce": cmd_reproduce,
            "plot": cmd_plot,
        }[args.command]
        return handler(args, order)
    except _UsageError as exc:
        print(f"hconv: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (HconvError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hconv: construction error: {msg}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
