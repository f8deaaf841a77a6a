"""Command-line harness.

Subcommands
-----------
``solve``      minimize a problem with one method, emit a JSON/CSV trace
``certify``    evaluate the global-optimality certificate at a point
``compare``    run several methods on one problem, emit a CSV table
``generate``   draw a reproducible bounded-below instance as JSON
``reproduce-example``  run the built-in two-valley showcase end to end
                       and assert all of its known quantities

Machine output goes to stdout (or ``--out``); progress and human
narration go to stderr.  Exit codes: 0 success / certified global
minimum, 1 failed verification or a negative certificate, 2 unbounded
below, 3 iteration limit, 4 input error, 5 stalled at a non-global
inf-stationary point (MCD with finite ``mu``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from .convex import ConvexPAView
from .errors import GenerationFailure
from .mgcd import check_global_opt, line_search_pa, mcd_run, mgcd_run, project_piece
from .mhd import MHDConfig, mhd_run
from .oracle import pa_global_min
from .pa import DCForm, evaluate, global_codiff
from .problems import generate_pa, worked_example

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNBOUNDED = 2
EXIT_ITER_LIMIT = 3
EXIT_INPUT = 4
EXIT_STALLED = 5

_STATUS_EXIT = {
    "global_min": EXIT_OK,
    "stationary": EXIT_OK,
    "unbounded_below": EXIT_UNBOUNDED,
    "iter_limit": EXIT_ITER_LIMIT,
    "inf_stationary": EXIT_STALLED,
}


class InputError(Exception):
    pass


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        _progress(f"wrote {out}")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as exc:
        raise InputError(f"cannot parse float list {text!r}") from exc


def _load_problem(args) -> DCForm:
    if getattr(args, "problem", None):
        try:
            with open(args.problem) as fh:
                return DCForm.from_json(fh.read())
        except (OSError, KeyError, ValueError) as exc:
            raise InputError(f"cannot load problem file {args.problem}: {exc}") from exc
    if getattr(args, "generate", None):
        parts = args.generate.split(",")
        if len(parts) != 4:
            raise InputError("--generate expects d,l,s,seed")
        try:
            d, l, s, seed = (int(p) for p in parts)
            return generate_pa(seed, d, l, s, scale=args.scale)
        except (ValueError, GenerationFailure) as exc:
            raise InputError(f"generation failed: {exc}") from exc
    raise InputError("need --problem FILE or --generate d,l,s,seed")


def _start_point(args, d: int) -> np.ndarray:
    if getattr(args, "x0", None):
        x0 = _parse_floats(args.x0)
        if x0.size != d:
            raise InputError(f"--x0 has {x0.size} entries, problem dimension is {d}")
        return x0
    return np.zeros(d)


def _run_method(method: str, f: DCForm, x0: np.ndarray, args):
    """Run one method; returns (status, final_x, final_f, n_steps, trace_dict, trace_csv)."""
    tol = args.tol
    if method == "mgcd":
        run = mgcd_run(f, x0, tol=tol, max_iter=args.max_iter)
    elif method == "mcd":
        run = mcd_run(f, x0, mu=args.mu, tol=tol, max_iter=args.max_iter)
    elif method == "mhd":
        if f.minus.shape[0] != 1:
            raise InputError("--method mhd needs a convex problem (a single min-part piece)")
        view = ConvexPAView(f)
        unbounded = {}

        def exact_ls(x, v):
            res = line_search_pa(f, x, v)
            if res.unbounded:
                unbounded["ray"] = -v / np.linalg.norm(v)
                raise _UnboundedSignal
            return res.alpha

        cfg = MHDConfig(stop_tol=tol or 1e-8, max_iter=args.max_iter)
        try:
            trace = mhd_run(view, x0, cfg, exact_line_search=exact_ls)
        except _UnboundedSignal:
            return "unbounded_below", x0, float(evaluate(f, x0)), 0, {
                "status": "unbounded_below",
                "ray": list(map(float, unbounded["ray"])),
            }, ""
        status = "global_min" if trace.status == "stationary" else trace.status
        return (
            status,
            trace.final_x,
            trace.final_f,
            len(trace.steps) - 1,
            trace.to_dict(),
            trace.to_csv(),
        )
    else:
        raise InputError(f"unknown method {method!r}")
    return run.status, run.final_x, run.final_f, run.n_steps, run.to_dict(), _run_csv(run)


class _UnboundedSignal(Exception):
    pass


def _run_csv(run) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "f", "chosen_j", "alpha", "n_projections", "discarded"])
    for rec in run.records:
        writer.writerow(
            [
                rec.n,
                repr(rec.f),
                "" if rec.chosen_j is None else rec.chosen_j,
                "" if rec.alpha is None else repr(rec.alpha),
                len(rec.projections),
                ";".join(map(str, rec.discarded)),
            ]
        )
    return buf.getvalue()


def cmd_solve(args) -> int:
    f = _load_problem(args)
    x0 = _start_point(args, f.d)
    _progress(f"solving d={f.d} l={f.plus.shape[0]} s={f.minus.shape[0]} with {args.method}")
    t0 = time.perf_counter()
    status, xf, ff, n_steps, trace, trace_csv = _run_method(args.method, f, x0, args)
    wall = time.perf_counter() - t0

    verified = None
    if status == "global_min":
        lp = pa_global_min(f)
        verified = lp.bounded and abs(ff - lp.value) <= 1e-6
        if not verified:
            _progress(f"VERIFICATION FAILED: claimed {ff}, oracle {lp.value if lp.bounded else 'unbounded'}")

    result = {
        "method": args.method,
        "status": status,
        "x0": list(map(float, x0)),
        "final_x": list(map(float, xf)),
        "final_f": float(ff),
        "n_steps": n_steps,
        "wall_time_s": wall,
        "oracle_verified": verified,
        "trace": trace,
    }
    if args.format == "csv":
        _emit(trace_csv, args.out)
    else:
        _emit(json.dumps(result, indent=2), args.out)
    code = _STATUS_EXIT.get(status, EXIT_FAIL)
    if status == "global_min" and not verified:
        code = EXIT_FAIL
    return code


def cmd_certify(args) -> int:
    f = _load_problem(args)
    point = _parse_floats(args.point)
    if point.size != f.d:
        raise InputError(f"--point has {point.size} entries, problem dimension is {f.d}")
    is_global, cert = check_global_opt(f, point, tol=args.tol or 1e-9)
    result = cert.to_dict()
    result["verdict"] = "GLOBAL" if is_global else "NOT GLOBAL"
    result["f"] = float(evaluate(f, point))
    _emit(json.dumps(result, indent=2), args.out)
    return EXIT_OK if is_global else EXIT_FAIL


def cmd_compare(args) -> int:
    f = _load_problem(args)
    x0 = _start_point(args, f.d)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    lp = pa_global_min(f)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "status", "iterations", "final_value", "wall_time_s", "oracle_gap"])
    for method in methods:
        t0 = time.perf_counter()
        try:
            status, _, ff, n_steps, _, _ = _run_method(method, f, x0, args)
        except InputError as exc:
            writer.writerow([method, f"error: {exc}", "", "", "", ""])
            continue
        wall = time.perf_counter() - t0
        gap = abs(ff - lp.value) if lp.bounded else math.inf
        writer.writerow([method, status, n_steps, repr(float(ff)), f"{wall:.6f}", repr(float(gap))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    f = _load_problem(args)
    _emit(f.to_json(indent=2), args.out)
    return EXIT_OK


def cmd_reproduce_example(args) -> int:
    """Run the two-valley showcase and assert its known quantities."""
    f = worked_example()
    x0 = np.array([2.0, 2.0])
    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool) -> None:
        checks.append((name, bool(ok)))
        _progress(f"  [{'ok' if ok else 'FAIL'}] {name}")

    gc = global_codiff(f, x0)
    hypo_expected = {
        (0, 3, 0), (-4, 1, 0), (0, 2, 1), (-4, 2, -1),
        (0, -1, 0), (-4, -3, 0), (0, -2, 1), (-4, -2, -1),
        (0, 1, 1), (-4, -1, 1), (0, 0, 2), (-4, 0, 0),
        (0, 1, -1), (-4, -1, -1), (0, 0, 0), (-4, 0, -2),
    }
    hyper_expected = {
        (1, 2, 0), (1, -2, 0), (1, 0, 1), (1, 0, -1),
        (0, -1, 0), (4, 1, 0), (0, 0, -1), (4, 0, 1),
    }
    hypo_set = {tuple(int(round(c)) for c in row) for row in gc.hypo}
    hyper_set = {tuple(int(round(c)) for c in row) for row in gc.hyper}
    on_lattice = np.allclose(gc.hypo, np.round(gc.hypo), atol=1e-12) and np.allclose(
        gc.hyper, np.round(gc.hyper), atol=1e-12
    )
    check("hypodifferential at (2,2) is the known 16-vertex set",
          hypo_set == hypo_expected and on_lattice)
    check("hyperdifferential at (2,2) is the known 8-vertex set",
          hyper_set == hyper_expected and on_lattice)

    z1 = gc.hyper[0]
    check("z_1(2,2) = (1, 2, 0)", np.allclose(z1, [1.0, 2.0, 0.0], atol=1e-12))

    proj = project_piece(f, x0, 0)
    exact = np.array([-1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0])
    check("projection of piece 1 is (-0.1111, 0.2222, 0.2222) to 1e-3",
          np.max(np.abs(proj - np.array([-0.1111, 0.2222, 0.2222]))) < 1e-3)
    check("projection of piece 1 equals (-1/9, 2/9, 2/9) to 1e-9",
          np.max(np.abs(proj - exact)) < 1e-9)

    run = mgcd_run(f, x0)
    check("descent reaches (0, 0) in exactly one step",
          run.n_steps == 1 and np.allclose(run.final_x, [0.0, 0.0], atol=1e-9))
    check("status is a certified global minimum",
          run.status == "global_min" and run.certificate.is_global)
    lp = pa_global_min(f)
    check("LP oracle agrees: minimum 0 at (0, 0)",
          lp.bounded and abs(lp.value) < 1e-12 and np.allclose(lp.argmin, [0, 0], atol=1e-9))
    ok_20, cert_20 = check_global_opt(f, x0)
    check("(2, 2) is not globally optimal, witnessed by piece 1",
          not ok_20 and cert_20.a_values[0] < 0)

    result = {
        "x1": list(map(float, run.final_x)),
        "a1_x0": float(proj[0]),
        "v1_x0": list(map(float, proj[1:])),
        "checks": {name: ok for name, ok in checks},
    }
    _emit(json.dumps(result, indent=2), args.out)
    if all(ok for _, ok in checks):
        _progress(f"x1 = (0, 0), a1(x0) = {proj[0]:.4f} -- all checks passed")
        return EXIT_OK
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codescent",
        description="Codifferential descent methods for piecewise-affine and convex minimization.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_flags(p, with_method=True):
        p.add_argument("--problem", help="problem file (DCForm JSON)")
        p.add_argument("--generate", metavar="d,l,s,seed", help="draw a reproducible instance")
        p.add_argument("--scale", type=float, default=1.0, help="scaling for --generate")
        p.add_argument("--x0", help="comma-separated start point (origin if omitted)")
        p.add_argument("--tol", type=float, default=None, help="certificate tolerance")
        p.add_argument("--max-iter", type=int, default=1000, dest="max_iter", help="iteration cap")
        p.add_argument("--mu", type=float, default=math.inf, help="hyper-offset cutoff (mcd only)")
        p.add_argument("--out", help="write machine output to this path instead of stdout")
        if with_method:
            p.add_argument("--method", choices=("mhd", "mcd", "mgcd"), default="mgcd")

    fmt = dict(formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    p_solve = sub.add_parser("solve", help="minimize a problem and emit the trace", **fmt)
    add_problem_flags(p_solve)
    p_solve.add_argument("--format", choices=("json", "csv"), default="json")
    p_solve.set_defaults(func=cmd_solve)

    p_cert = sub.add_parser("certify", help="global-optimality certificate at a point", **fmt)
    add_problem_flags(p_cert, with_method=False)
    p_cert.add_argument("--point", required=True, help="comma-separated point")
    p_cert.set_defaults(func=cmd_certify)

    p_cmp = sub.add_parser("compare", help="run several methods on one problem (CSV)", **fmt)
    add_problem_flags(p_cmp, with_method=False)
    p_cmp.add_argument("--methods", default="mgcd,mcd", help="comma-separated method list")
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("generate", help="emit a generated instance as JSON", **fmt)
    add_problem_flags(p_gen, with_method=False)
    p_gen.set_defaults(func=cmd_generate)

    p_rep = sub.add_parser(
        "reproduce-example",
        help="run the built-in showcase and assert its known quantities",
        **fmt,
    )
    p_rep.add_argument("--out", help="write machine output to this path instead of stdout")
    p_rep.set_defaults(func=cmd_reproduce_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _progress(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
