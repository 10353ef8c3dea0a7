"""Command-line interface: ``annulus-bvp <command> [--file PATH] [flags]``.

Exit codes: 0 success, 1 input/usage error, 2 numerical non-convergence,
3 internal error. CSV floats use 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from . import certify
from .certify import CertificationError
from .eigen import EigenError, first_eigen_fd, first_eigen_shoot
from .exprlang import ExprError
from .problem import ProblemError, load_problem, packaged_problem
from .reduction import ReductionError, map_t_to_r
from .solver import GridFunction, SolverError, picard_solve, shoot_solve, sweep
from .verify import verify_solution
from .worked_examples import EXAMPLE_IDS, run_example

EXIT_OK, EXIT_USAGE, EXIT_NONCONV, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class NonConvergence(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def write_svg(path, x, ys, labels=None, title="", xlabel="", ylabel="", width=640, height=400):
    """Minimal standalone SVG line chart; ys is a list of series (NaN = gap)."""
    x = np.asarray(x, dtype=float)
    series = [np.asarray(y, dtype=float) for y in ys]
    finite = np.concatenate([y[np.isfinite(y)] for y in series] + [np.zeros(0)])
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xlo, xhi = float(x.min()), float(x.max())
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    ml, mr, mt, mb = 70, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    def px(v):
        return ml + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return mt + (yhi - v) / (yhi - ylo) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{title}</text>',
           f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="15" y="{height / 2:.1f}" transform="rotate(-90 15 {height / 2:.1f})" '
           f'text-anchor="middle">{ylabel}</text>']
    for v in (xlo, xhi):
        out.append(f'<text x="{px(v):.1f}" y="{mt + ph + 18}" text-anchor="middle" '
                   f'font-size="11">{v:.4g}</text>')
    for v in (ylo, yhi):
        out.append(f'<text x="{ml - 5}" y="{py(v):.1f}" text-anchor="end" '
                   f'font-size="11">{v:.4g}</text>')
    for k, y in enumerate(series):
        color = colors[k % len(colors)]
        seg = []
        for xi, yi in zip(x, y):
            if np.isfinite(yi):
                seg.append(f"{px(xi):.2f},{py(yi):.2f}")
            elif seg:
                out.append(f'<polyline fill="none" stroke="{color}" points="{" ".join(seg)}"/>')
                seg = []
        if seg:
            out.append(f'<polyline fill="none" stroke="{color}" points="{" ".join(seg)}"/>')
        if labels:
            out.append(f'<text x="{ml + 10}" y="{mt + 16 + 14 * k}" fill="{color}" '
                       f'font-size="12">{labels[k]}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def _problem(args):
    if args.file and args.example:
        raise UsageError("give either --file or --example, not both")
    if args.example:
        return packaged_problem(args.example)
    if not args.file:
        raise UsageError("--file is required")
    return load_problem(args.file)


def _need(value, name):
    if value is None:
        raise UsageError(f"{name} is required (in the problem file or on the command line)")
    return value


# --- commands ----------------------------------------------------------------

def cmd_reduce(args, out):
    p = _problem(args)
    if p.mode != "annulus":
        raise UsageError("reduce needs a problem file with mode 'annulus'")
    ann = p.annulus
    t = np.linspace(0.0, 1.0, 1001)
    q = np.asarray(p.bvp.q(t), dtype=float)
    r = map_t_to_r(t, ann)
    print(f"annulus: N={ann.N}, r1={ann.r1:.17g}, r2={ann.r2:.17g}, h(r,u) = {ann.h.source}", file=out)
    if ann.N >= 3:
        A, B = ann.constants()
        print(f"A = {A:.17g}", file=out)
        print(f"B = {B:.17g}", file=out)
    print(f"q(0) = {q[0]:.17g}, q(1) = {q[-1]:.17g}", file=out)
    i, j = int(np.argmin(q)), int(np.argmax(q))
    print(f"min q = {q[i]:.17g} at t = {t[i]:.6g}", file=out)
    print(f"max q = {q[j]:.17g} at t = {t[j]:.6g}", file=out)
    if args.csv:
        _write_csv(args.csv, ["t", "q", "r"], zip(t, q, r))
    if args.svg:
        write_svg(args.svg, t, [q], ["q(t)"], "reduced weight", "t", "q")
    return EXIT_OK


_THEOREM_IDS = {"1.1": "T1_1", "1.2": "T1_2", "1.3": "T1_3", "1.4": "T1_4", "4.1": "T4_1", "4.2": "T4_2"}


def cmd_certify(args, out):
    p = _problem(args)
    th = args.theorem
    if th in ("1.1", "1.2"):
        R = _need(args.R if args.R is not None else p.R, "R")
        p.R = R
        key = "m" if th == "1.1" else "M"
        fn = certify.certify_T11 if th == "1.1" else certify.certify_T12
        rng = fn(R, p.override(key), p.bvp)
    elif th in ("1.3", "1.4"):
        r = _need(args.r if args.r is not None else p.r, "r")
        p.r = r
        key = "m" if th == "1.3" else "M"
        fn = certify.certify_T13 if th == "1.3" else certify.certify_T14
        rng = fn(r, p.override(key), p.bvp)
    else:
        c = _need(args.c if args.c is not None else p.c, "c")
        delta = _need(args.delta if args.delta is not None else p.delta, "delta")
        R = _need(args.R if args.R is not None else p.R, "R")
        fn = certify.certify_T41 if th == "4.1" else certify.certify_T42
        rng, _ = fn(p.b, c, delta, R, p.bvp)
    print(rng.describe(), file=out)
    print("inputs:", file=out)
    for k in sorted(rng.inputs):
        v = rng.inputs[k]
        if isinstance(v, float):
            v = f"{v:.17g}"
        elif isinstance(v, tuple):
            v = "(" + ", ".join(f"{x:.10g}" for x in v) + ")"
        print(f"  {k} = {v}", file=out)
    if rng.hypotheses:
        print("hypothesis evidence:", file=out)
        for h in rng.hypotheses:
            print(f"  {h}", file=out)
    for w in rng.warnings:
        print(f"warning: {w}", file=out)
    return EXIT_OK


def cmd_eigen(args, out):
    p = _problem(args)
    m = p.bvp.m_weight(lambda t: p.b.vectorized(t=t))
    shoot = first_eigen_shoot(m)
    fd = first_eigen_fd(m)
    gap = abs(shoot.lambda1 - fd.lambda1) / abs(shoot.lambda1)
    print(f"b(t) = {p.b.source}", file=out)
    print(f"lambda1 (shooting) = {shoot.lambda1:.17g}", file=out)
    print(f"lambda1 (finite differences, extrapolated) = {fd.lambda1:.17g}", file=out)
    print(f"relative gap = {gap:.3e}", file=out)
    t = shoot.phi.t
    if args.csv:
        _write_csv(args.csv, ["t", "phi"], zip(t, shoot.phi.values))
    if args.svg:
        write_svg(args.svg, t, [shoot.phi.values], ["phi"], "first eigenfunction", "t", "phi")
    return EXIT_OK


def _lambda(args, p):
    lam = args.lam if args.lam is not None else p.lam
    lam = _need(lam, "lambda (--lambda)")
    if not (math.isfinite(lam) and lam > 0):
        raise UsageError("lambda must be finite and positive")
    return lam


def cmd_solve(args, out):
    p = _problem(args)
    lam = _lambda(args, p)
    cfg = p.solver
    if args.method == "picard":
        reports = [picard_solve(p.bvp, lam, damping=cfg.damping, tol=cfg.tol, max_iter=cfg.max_iter,
                                n=cfg.n, points_per_cell=cfg.points_per_cell,
                                interpolation=cfg.interpolation)]
    else:
        reports = shoot_solve(p.bvp, lam, slope_range=cfg.slope_range, n_scan=cfg.n_scan,
                              tol=cfg.shoot_tol, steps=cfg.steps, integral_tol=cfg.integral_tol)
    if not reports:
        print(f"no positive solution found by {args.method} at lambda = {lam:.17g}", file=out)
        return EXIT_NONCONV
    status = EXIT_OK
    for k, rep in enumerate(reports, 1):
        if len(reports) > 1:
            print(f"--- solution {k} of {len(reports)}", file=out)
        print(f"method = {rep.method}", file=out)
        print(f"lambda = {rep.lam:.17g}", file=out)
        print(f"converged = {rep.converged}", file=out)
        print(f"iterations = {rep.iterations}", file=out)
        if rep.slope is not None:
            print(f"slope u'(0) = {rep.slope:.17g}", file=out)
        print(f"sup_norm = {rep.sup_norm:.17g}", file=out)
        print(f"min on [1/4, 3/4] = {rep.min_on_quarter:.17g}", file=out)
        print(f"integral residual = {rep.residual_integral:.3e}", file=out)
        print(f"ode residual = {rep.residual_ode:.3e}", file=out)
        if rep.message:
            print(f"message: {rep.message}", file=out)
        ver = verify_solution(rep.u, lam, p.bvp)
        print("verification:", file=out)
        print("  " + ver.summary().replace("\n", "\n  "), file=out)
        if not rep.converged:
            status = EXIT_NONCONV
        elif not ver.overall and status == EXIT_OK:
            status = EXIT_NONCONV
    first = reports[0]
    if args.csv:
        if len(reports) == 1:
            _write_csv(args.csv, ["t", "u"], zip(first.u.t, first.u.values))
        else:
            header = ["t"] + [f"u_{k}" for k in range(1, len(reports) + 1)]
            cols = [first.u.t] + [r.u.values for r in reports]
            _write_csv(args.csv, header, zip(*cols))
    if args.svg:
        write_svg(args.svg, first.u.t, [r.u.values for r in reports],
                  [f"u_{k}" for k in range(1, len(reports) + 1)], f"lambda = {lam:.6g}", "t", "u")
    return status


def cmd_sweep(args, out):
    p = _problem(args)
    a, b, k = args.lambda_from, args.lambda_to, args.steps
    for v, name in ((a, "--lambda-from"), (b, "--lambda-to")):
        if not (math.isfinite(v) and v > 0):
            raise UsageError(f"{name} must be finite and positive")
    if k < 1:
        raise UsageError("--steps must be at least 1")
    if k == 1:
        lams = np.array([a])
    elif args.log:
        lams = np.geomspace(a, b, k)
    else:
        lams = np.linspace(a, b, k)
    rows = sweep(p.bvp, lams, method=args.method, config=p.solver)
    width = max([r.n_solutions for r in rows] + [1])
    header = ["lambda", "n_solutions"]
    header += [f"sup_norm_{i}" for i in range(1, width + 1)]
    header += [f"min_quarter_{i}" for i in range(1, width + 1)]
    header.append("error")
    table = []
    for r in rows:
        sup = sorted(zip(r.sup_norms, r.min_quarters))
        pad = width - len(sup)
        row = [r.lam, str(r.n_solutions)]
        row += [s for s, _ in sup] + [""] * pad
        row += [m for _, m in sup] + [""] * pad
        row.append(r.error)
        table.append(row)
    if args.csv:
        _write_csv(args.csv, header, table)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in table:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
        out.write(buf.getvalue())
    if args.svg:
        ys = []
        for i in range(width):
            ys.append([sorted(r.sup_norms)[i] if r.n_solutions > i else np.nan for r in rows])
        write_svg(args.svg, lams, ys, [f"branch {i + 1}" for i in range(width)],
                  "sup norm vs lambda", "lambda", "sup u")
    return EXIT_OK


def cmd_examples(args, out):
    ids = EXAMPLE_IDS if args.id == "all" else (args.id,)
    ok = True
    for ex in ids:
        try:
            checks, rng = run_example(ex)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        print(f"Example {ex}: {rng.describe()}", file=out)
        for c in checks:
            print(f"  {c}", file=out)
            ok &= c.passed
    print("all thresholds reproduced" if ok else "some thresholds NOT reproduced", file=out)
    return EXIT_OK if ok else EXIT_NONCONV


def _read_solution(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2 or rows[0][0].strip() != "t":
        raise UsageError(f"{path}: expected a CSV with header t,u")
    try:
        data = np.array([[float(x) for x in row[:2]] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if data.shape[0] < 3:
        raise UsageError(f"{path}: need at least 3 rows")
    t = data[:, 0]
    if not np.allclose(t, np.linspace(0.0, 1.0, t.size), rtol=0, atol=1e-12):
        raise UsageError(f"{path}: t must be a uniform grid on [0, 1]")
    return GridFunction(data[:, 1])


def cmd_verify(args, out):
    p = _problem(args)
    lam = _lambda(args, p)
    u = _read_solution(args.solution)
    rep = verify_solution(u, lam, p.bvp)
    print(f"lambda = {lam:.17g}, grid points = {u.n}, sup_norm = {u.sup_norm():.17g}", file=out)
    print(rep.summary(), file=out)
    return EXIT_OK if rep.overall else EXIT_NONCONV


# --- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="annulus-bvp",
                 description="Positive solutions of u'' + λ q(t) f(t,u) = 0, u(0) = u(1) = 0.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, csv_out=True):
        sp.add_argument("--file", help="JSON problem file")
        sp.add_argument("--example", choices=EXAMPLE_IDS, help="use a shipped example problem")
        if csv_out:
            sp.add_argument("--csv", help="write CSV output here")
            sp.add_argument("--svg", help="write an SVG line chart here")

    sp = sub.add_parser("reduce", help="radial reduction summary")
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("certify", help="λ-range guaranteeing a positive solution")
    common(sp, csv_out=False)
    sp.add_argument("--theorem", required=True, choices=list(_THEOREM_IDS))
    sp.add_argument("--R", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--delta", type=float)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("eigen", help="first eigenvalue of -u'' = λ q b u")
    common(sp)
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser("solve", help="solve at one λ")
    common(sp)
    sp.add_argument("--method", choices=["picard", "shoot"], default="shoot")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="solution count and norms over a λ range")
    common(sp)
    sp.add_argument("--lambda-from", type=float, required=True)
    sp.add_argument("--lambda-to", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--log", action="store_true")
    sp.add_argument("--method", choices=["picard", "shoot"], default="shoot")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("examples", help="replicate a worked example")
    sp.add_argument("id", help=f"one of {', '.join(EXAMPLE_IDS)} or 'all'")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("verify", help="check a solution CSV (t,u)")
    common(sp, csv_out=False)
    sp.add_argument("--solution", required=True)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ProblemError, ExprError, ReductionError, CertificationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, EigenError, NonConvergence, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
