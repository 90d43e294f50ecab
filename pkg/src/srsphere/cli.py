"""Command-line entry point: ``srsphere <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Every document starts with a header carrying the toolkit version
and the fully resolved configuration, so identical arguments always give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .checks import EXACT_PASS, PASS

TOOL = "srsphere"
SPACE_KINDS = {"s2n1": "contact", "s4n3": "quaternionic"}


class UsageError(Exception):
    pass


# parsing helpers ------------------------------------------------------------------

def parse_scalar(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def parse_vector(text: str) -> list[Fraction]:
    """Comma-separated decimals or a/b rationals, kept exact."""
    parts = [s for s in text.split(",") if s.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty vector")
    return [parse_scalar(s) for s in parts]


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def resolved_config(args: argparse.Namespace) -> dict:
    skip = {"handler", "output"}
    return {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip}


def header(args: argparse.Namespace) -> dict:
    return {"tool": TOOL, "version": __version__, "config": resolved_config(args)}


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def render_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def render_csv(head: dict, columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {TOOL} {__version__}\n")
    buf.write("# config: " + json.dumps(head["config"], sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


# subcommands ---------------------------------------------------------------------

def _space_dim(space: str, n: int) -> int:
    return 2 * n + 2 if space == "s2n1" else 4 * n + 4


def cmd_trace(args) -> tuple[str, int]:
    from .geodesics import CONTACT, GeodesicSpec, is_closed_contact, trace

    kind = SPACE_KINDS[args.space]
    dim = _space_dim(args.space, args.n)
    if len(args.p) != dim or len(args.v) != dim:
        raise UsageError(f"--p and --v need {dim} components for {args.space} with n={args.n}")
    if not args.t1 > args.t0:
        raise UsageError("--t1 must exceed --t0")
    try:
        spec = GeodesicSpec.from_exact(args.p, args.v, kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    times = np.linspace(float(args.t0), float(args.t1), args.samples)
    tr = trace(spec, times, float(args.h))

    closedness = None
    if kind == CONTACT and dim == 4:
        c = spec.exact_moments()[0]
        if spec.exact_norm_sq() == 1 + c * c:
            closed, period = is_closed_contact(c)
            closedness = {"curvature": c, "closed": closed, "period": period}
        else:
            closedness = {"curvature": None, "closed": None, "period": None,
                          "note": "v is not arc-length normalised (|v|^2 != 1 + c^2)"}

    k = tr.horizontality.shape[1]
    columns = ["t"] + [f"x{i}" for i in range(dim)] + ["speed"] + [f"horiz_residual_{j + 1}" for j in range(k)]
    summary = {
        "max_horizontality": tr.max_horizontality(),
        "max_speed_identity_residual": float(np.abs(tr.pythagoras_residual()).max()),
        "max_radius_error": tr.max_radius_error(),
        "final_distance_to_p": float(np.linalg.norm(tr.points[-1] - spec.p)),
    }
    if args.out == "csv":
        rows = np.column_stack([tr.times, tr.points, tr.speed, tr.horizontality])
        return render_csv(header(args), columns, rows), 0
    doc = {
        "header": header(args),
        "spec": {"kind": kind, "p": spec.p, "v": spec.v, "moments": spec.moments,
                 "sr_speed": spec.sr_speed},
        "closedness": closedness,
        "summary": summary,
        "columns": columns,
        "t": tr.times,
        "points": tr.points,
        "speed": tr.speed,
        "horizontality": tr.horizontality,
    }
    return render_json(doc), 0


def cmd_shoot(args) -> tuple[str, int]:
    from .shooting import ShootingConfig, ShootingProblem, solve

    kind = SPACE_KINDS[args.space]
    dim = _space_dim(args.space, args.n)
    if len(args.p) != dim or len(args.q) != dim:
        raise UsageError(f"--p and --q need {dim} components for {args.space} with n={args.n}")
    guesses = [[float(x) for x in g] for g in (args.guess or [])]
    if any(len(g) != dim for g in guesses):
        raise UsageError(f"--guess vectors need {dim} components")
    try:
        problem = ShootingProblem([float(x) for x in args.p], [float(x) for x in args.q], float(args.T), kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config = ShootingConfig(max_iters=args.max_iters, tol=float(args.tol), n_starts=args.starts,
                            seed=args.seed, initial_guesses=guesses)
    sols = solve(problem, config)
    doc = {"header": header(args), "solutions": [s.as_dict() for s in sols]}
    return render_json(doc), 0


def cmd_htype(args) -> tuple[str, int]:
    from .htype import HTypePoint, HTypeState, integrate_geodesic, to_rows, vertical_velocity_residual

    if len(args.lam) != 3 or len(args.u0) != 4:
        raise UsageError("--lambda needs 3 components and --u0 needs 4")
    x0 = args.x0 or [0] * 4
    z0 = args.z0 or [0] * 3
    if len(x0) != 4 or len(z0) != 3:
        raise UsageError("--x0 needs 4 components and --z0 needs 3")
    if not (args.T > 0 and args.step > 0):
        raise UsageError("--T and --step must be positive")
    state = HTypeState(HTypePoint([float(v) for v in x0], [float(v) for v in z0]),
                       [float(v) for v in args.u0], [float(v) for v in args.lam])
    res = integrate_geodesic(state, float(args.T), float(args.step))
    traj = res.rk4 if args.method == "rk4" else res.closed_form
    columns = ["t", "x1", "x2", "x3", "x4", "zI", "zJ", "zK", "u1", "u2", "u3", "u4", "speed"]
    rows = to_rows(traj)
    if args.out == "csv":
        return render_csv(header(args), columns, rows), 0
    doc = {
        "header": header(args),
        "summary": {
            "max_discrepancy_rk4_vs_closed_form": res.max_discrepancy,
            "max_speed_drift": float(np.abs(traj.speed - traj.speed[0]).max()),
            "max_vertical_velocity": vertical_velocity_residual(traj),
        },
        "columns": columns,
        "rows": rows,
    }
    return render_json(doc), 0


def cmd_spectrum(args) -> tuple[str, int]:
    from .subelliptic import degree_block_spectrum, space_matrices

    mats = space_matrices(args.space, args.degree)
    names = [args.operator] if args.operator != "all" else list(mats)
    operators = {}
    for name in names:
        M = mats[name]
        operators[name] = {
            "filtered": M.is_block_lower_filtered(),
            "blocks": degree_block_spectrum(M),
        }
    doc = {"header": header(args), "dimension": len(mats["sublaplacian"].basis), "operators": operators}
    ok = all(op["filtered"] and all(b["exact"] for b in op["blocks"]) for op in operators.values())
    return render_json(doc), 0 if ok else 1


def cmd_heat(args) -> tuple[str, int]:
    from .subelliptic import heat_factorization

    if not args.t > 0:
        raise UsageError("--t must be positive")
    rep = heat_factorization(float(args.t), args.degree)
    ok = (rep.decomposition_exact and rep.split_discrepancy <= args.tol
          and rep.laplace_beltrami_discrepancy <= args.tol)
    doc = {"header": header(args), **rep.as_dict(), "within_tolerance": ok}
    return render_json(doc), 0 if ok else 1


def cmd_verify(args) -> tuple[str, int]:
    from .suites import MODULES, run_module

    modules = MODULES if args.module == "all" else (args.module,)
    results = []
    for m in modules:
        for c in run_module(m):
            results.append((m, c))
    failed = [(m, c) for m, c in results if c.failed]
    for m, c in failed:
        print(f"FAIL [{m}] {c.name} ({c.source})", file=sys.stderr)
    code = 1 if failed else 0
    head = header(args)
    if args.out == "json":
        doc = {
            "header": head,
            "passed": not failed,
            "counts": {s: sum(1 for _, c in results if c.status == s) for s in sorted({c.status for _, c in results})},
            "checks": [{"module": m, **c.as_dict()} for m, c in results],
        }
        return render_json(doc), code
    if args.out == "csv":
        buf = io.StringIO()
        buf.write(f"# {TOOL} {__version__}\n")
        buf.write("# config: " + json.dumps(head["config"], sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["module", "status", "name", "source", "detail"])
        for m, c in results:
            w.writerow([m, c.status, c.name, c.source, json.dumps(_jsonable(c.detail), sort_keys=True)])
        return buf.getvalue(), code
    width = max(len(c.name) for _, c in results)
    lines = [f"# {TOOL} {__version__}", "# config: " + json.dumps(head["config"], sort_keys=True)]
    for m, c in results:
        mark = c.status.upper() if c.status not in (EXACT_PASS, PASS) else c.status
        lines.append(f"{m:<12} {mark:<10} {c.name:<{width}}  [{c.source}]")
    lines.append(f"# {len(results) - len(failed)}/{len(results)} checks without failure")
    return "\n".join(lines) + "\n", code


# parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Sub-Riemannian spheres and the H-type group.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p, formats, default):
        p.add_argument("--out", choices=formats, default=default, help="output format")
        p.add_argument("--output", "-o", default="-", help="output path ('-' for standard output)")

    p = sub.add_parser("trace", help="sample a closed-form geodesic")
    p.add_argument("--space", choices=sorted(SPACE_KINDS), required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p", type=parse_vector, required=True)
    p.add_argument("--v", type=parse_vector, required=True)
    p.add_argument("--t0", type=parse_scalar, default=Fraction(0))
    p.add_argument("--t1", type=parse_scalar, required=True)
    p.add_argument("--samples", type=positive_int, default=1000)
    p.add_argument("--h", type=parse_scalar, default=Fraction(1, 10000), help="finite-difference step")
    add_output(p, ["json", "csv"], "json")
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("shoot", help="solve a two-point boundary problem")
    p.add_argument("--space", choices=sorted(SPACE_KINDS), required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p", type=parse_vector, required=True)
    p.add_argument("--q", type=parse_vector, required=True)
    p.add_argument("--T", type=parse_scalar, required=True)
    p.add_argument("--starts", type=positive_int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=parse_scalar, default=Fraction(1, 10**10), help="accept when residual^2 <= tol")
    p.add_argument("--max-iters", type=positive_int, default=100)
    p.add_argument("--guess", type=parse_vector, action="append", help="extra initial velocity (repeatable)")
    add_output(p, ["json"], "json")
    p.set_defaults(handler=cmd_shoot)

    p = sub.add_parser("htype", help="integrate a geodesic of the H-type group")
    p.add_argument("--lambda", dest="lam", type=parse_vector, required=True)
    p.add_argument("--u0", type=parse_vector, required=True)
    p.add_argument("--x0", type=parse_vector)
    p.add_argument("--z0", type=parse_vector)
    p.add_argument("--T", type=parse_scalar, required=True)
    p.add_argument("--step", type=parse_scalar, default=Fraction(1, 1000))
    p.add_argument("--method", choices=["rk4", "closed-form"], default="rk4")
    add_output(p, ["json", "csv"], "json")
    p.set_defaults(handler=cmd_htype)

    p = sub.add_parser("spectrum", help="eigenvalues per degree block on the polynomial quotient")
    p.add_argument("--space", choices=["s3", "s7"], default="s7")
    p.add_argument("--degree", type=positive_int, default=3)
    p.add_argument("--operator", choices=["sublaplacian", "vertical", "laplace_beltrami", "all"], default="all")
    add_output(p, ["json"], "json")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("heat", help="heat operator factorization report on S^7")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--degree", type=positive_int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    add_output(p, ["json"], "json")
    p.set_defaults(handler=cmd_heat)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--module", default="all",
                   choices=["all", "algebra", "frames", "geodesics", "shooting", "htype", "subelliptic"])
    add_output(p, ["table", "json", "csv"], "table")
    p.set_defaults(handler=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = args.handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    if args.output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
