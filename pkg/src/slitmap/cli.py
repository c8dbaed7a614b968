"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from pathlib import Path

import numpy as np

from .canonical import KINDS, CanonicalKind, default_alpha, default_z1, solve_map
from .errors import NumericalError, SlitMapError
from .evaluate import GridSpec, image_grid, inverse_points, map_points
from .geometry import load_region
from .serialize import load_solution, save_solution
from .verify import convergence_csv, convergence_table, selftest

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_SELFTEST = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_complex(text: str) -> complex:
    """Accept ``1.5+1.0i``, ``1.5+1.0j``, ``-2i`` or plain reals."""
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of integers: {text!r}") from None


def _make_kind(tag: str, region, args) -> CanonicalKind:
    if tag == "annulus":
        return CanonicalKind.annulus(args.z1 if args.z1 is not None else default_z1(region))
    if tag in ("circular", "radial"):
        alpha = args.alpha if args.alpha is not None else default_alpha(region)
        return CanonicalKind(tag, alpha=alpha)
    if tag == "parallel":
        return CanonicalKind.parallel(args.delta)
    return CanonicalKind.disk()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _read_points(args) -> np.ndarray:
    pts = list(args.z or [])
    if args.points:
        with open(args.points, encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    vals = [float(v) for v in row[:2]]
                except ValueError:
                    continue  # header line
                pts.append(complex(vals[0], vals[1] if len(vals) > 1 else 0.0))
    if not pts:
        raise UsageError("no query points given (use --z or --points)")
    return np.array(pts, dtype=complex)


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _points_csv(res, value_name: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["query_re", "query_im", f"{value_name}_re", f"{value_name}_im", "distance", "reliable"])
    for q, v, d, ok in zip(res.points, res.values, res.distance, res.reliable):
        w.writerow([_g(q.real), _g(q.imag), _g(v.real), _g(v.imag), _g(d), int(ok)])
    return buf.getvalue()


def _report_unreliable(res) -> None:
    bad = int(np.count_nonzero(~res.reliable))
    if bad:
        print(f"slitmap: {bad} of {res.points.size} points flagged unreliable", file=sys.stderr)


CLI_MIN_NODES = 8


def _check_n(n: int) -> None:
    if n < CLI_MIN_NODES or n % 2:
        raise UsageError("invalid discretization size (n must be even and >= 8)")


def cmd_map(args) -> int:
    _check_n(args.n)
    region = load_region(args.region)
    kind = _make_kind(args.kind, region, args)
    sol = solve_map(region, kind, args.n)
    save_solution(sol, args.out)
    res = sol.residuals
    print(
        f"{kind.tag}: n={sol.n} curves={len(region)} "
        f"linear residual {res['linear_system']:.2e}, winding residual {res['winding']:.2e}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    sol = load_solution(args.solution)
    res = map_points(sol, _read_points(args), derivative=args.derivative, upsample=args.upsample, strict=False)
    _write_text(args.out, _points_csv(res, "domega" if args.derivative else "omega"))
    _report_unreliable(res)
    return EXIT_OK


def cmd_invert(args) -> int:
    sol = load_solution(args.solution)
    res = inverse_points(sol, _read_points(args), upsample=args.upsample, strict=False)
    _write_text(args.out, _points_csv(res, "z"))
    _report_unreliable(res)
    return EXIT_OK


def _svg(grid) -> str:
    pts = np.concatenate([*grid.lines, *grid.boundary]) if (grid.lines or grid.boundary) else np.zeros(1)
    pts = pts[np.isfinite(pts)]
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    pad = 0.02 * max(x1 - x0, y1 - y0, 1e-9)
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0 - pad:.6g} {-(y1 + pad):.6g} {x1 - x0 + 2 * pad:.6g} {y1 - y0 + 2 * pad:.6g}">'
    ]
    for cls, lines in (("grid", grid.lines), ("boundary", grid.boundary)):
        for line in lines:
            coords = " ".join(f"{z.real:.9g},{-z.imag:.9g}" for z in line if np.isfinite(z))
            out.append(f'<polyline class="{cls}" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _grid_csv(grid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["type", "line", "index", "re", "im"])
    for cls, lines in (("grid", grid.lines), ("boundary", grid.boundary)):
        for k, line in enumerate(lines):
            for i, z in enumerate(line):
                w.writerow([cls, k, i, _g(z.real), _g(z.imag)])
    return buf.getvalue()


def cmd_grid(args) -> int:
    sol = load_solution(args.solution)
    spec = GridSpec(
        kind=args.grid,
        extent=tuple(args.extent) if args.extent else (-1.0, 1.0, -1.0, 1.0),
        center=args.center,
        radius=args.radius,
        lines=args.lines,
        points=args.points_per_line,
    )
    grid = image_grid(sol, spec, inverse=args.inverse, clearance=args.clearance, upsample=args.upsample)
    if not args.svg and not args.csv:
        raise UsageError("grid needs --svg and/or --csv")
    if args.svg:
        _write_text(args.svg, _svg(grid))
    if args.csv:
        _write_text(args.csv, _grid_csv(grid))
    return EXIT_OK


def cmd_convergence(args) -> int:
    for n in [*args.n, args.ref]:
        _check_n(n)
    region = load_region(args.region)
    tags = list(KINDS) if args.kinds == "all" else [k.strip() for k in args.kinds.split(",")]
    for tag in tags:
        if tag not in KINDS:
            raise UsageError(f"unknown kind {tag!r}")
    kinds = [_make_kind(tag, region, args) for tag in tags]
    rows = convergence_table(region, kinds, args.n, reference_n=args.ref)
    _write_text(args.out, convergence_csv(rows))
    return EXIT_OK


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = selftest()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    print(f"{sum(ok for _, ok, _ in results)}/{len(results)} checks passed in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slitmap", description="Conformal maps of multiply connected regions onto canonical slit domains.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def kind_opts(sp):
        sp.add_argument("--z1", type=parse_complex, help="point in hole 1 (annulus); default: centre of hole 1")
        sp.add_argument("--alpha", type=parse_complex, help="zero of the map (circular/radial); default: centroid of curve 0")
        sp.add_argument("--delta", type=float, default=math.pi / 4, help="slit angle for parallel slits (default pi/4)")

    sp = sub.add_parser("map", help="solve for the boundary correspondence and save it as JSON")
    sp.add_argument("--region", required=True)
    sp.add_argument("--kind", required=True, choices=KINDS)
    sp.add_argument("--n", type=int, required=True, help="nodes per curve (even, >= 8)")
    sp.add_argument("--out", required=True)
    kind_opts(sp)
    sp.set_defaults(func=cmd_map)

    for name, func, helptext in (
        ("eval", cmd_eval, "evaluate omega (or omega') at points of the region"),
        ("invert", cmd_invert, "evaluate the inverse map at points of the canonical domain"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--solution", required=True)
        sp.add_argument("--z", type=parse_complex, action="append", help="query point (repeatable)")
        sp.add_argument("--points", help="CSV file with re,im columns")
        sp.add_argument("--out", help="CSV output (default stdout)")
        sp.add_argument("--upsample", type=int, default=4)
        if name == "eval":
            sp.add_argument("--derivative", action="store_true")
        sp.set_defaults(func=func)

    sp = sub.add_parser("grid", help="images of grid lines as SVG/CSV polylines")
    sp.add_argument("--solution", required=True)
    sp.add_argument("--grid", choices=("cartesian", "polar"), default="cartesian")
    sp.add_argument("--extent", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    sp.add_argument("--center", type=parse_complex, default=0j)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--lines", type=int, default=10)
    sp.add_argument("--points-per-line", type=int, default=200)
    sp.add_argument("--clearance", type=float, default=0.0)
    sp.add_argument("--inverse", action="store_true", help="grid lives in the canonical plane")
    sp.add_argument("--upsample", type=int, default=4)
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("convergence", help="self-convergence table of boundary values")
    sp.add_argument("--region", required=True)
    sp.add_argument("--kinds", default="all", help="'all' or comma separated kinds")
    sp.add_argument("--n", type=_int_list, default=[16, 32, 64, 128, 256])
    sp.add_argument("--ref", type=int, default=512)
    sp.add_argument("--out", help="CSV output (default stdout)")
    kind_opts(sp)
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("selftest", help="run the closed-form oracle checks")
    sp.set_defaults(func=cmd_selftest)
    return p


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"slitmap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, SlitMapError, OSError, KeyError, ValueError) as exc:
        print(f"slitmap: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
