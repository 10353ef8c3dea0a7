"""Acceptance criteria 1-9, one pass/fail line each.

Run with pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from annulus_bvp.certify import certify_T41
from annulus_bvp.eigen import first_eigen_fd, first_eigen_shoot
from annulus_bvp.exprlang import parse
from annulus_bvp.kernel import green, green_diag
from annulus_bvp.worked_examples import run_example
from annulus_bvp.problem import packaged_problem
from annulus_bvp.quadrature import kernel_weight_integral
from annulus_bvp.ratio_bounds import max_ratio, min_ratio
from annulus_bvp.reduction import AnnularProblem, ReducedBVP, map_t_to_r, reduce
from annulus_bvp.solver import GridFunction, picard_solve, scan_endpoint, shoot_solve
from annulus_bvp.verify import verify_solution

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

PI2 = math.pi ** 2


def record(num, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def ones(s):
    return np.ones_like(np.asarray(s, dtype=float))


def test_criterion_1_kernel_integrals():
    kernel_weight_integral(ones)  # warm the Gauss node cache
    times, vals = [], None
    for _ in range(20):
        t0 = time.perf_counter()
        vals = (kernel_weight_integral(ones), kernel_weight_integral(ones, 0.25, 0.75))
        times.append((time.perf_counter() - t0) / 2)
    e1, e2 = abs(vals[0] - 1 / 6), abs(vals[1] - 11 / 96)
    per_call = float(np.median(times))
    ok = e1 <= 1e-12 and e2 <= 1e-12 and per_call < 1e-3
    record(1, ok, f"|I[0,1] - 1/6| = {e1:.1e}, |I[1/4,3/4] - 11/96| = {e2:.1e} (tol 1e-12); "
                  f"median {per_call * 1e3:.3f} ms per call (< 1 ms)")


def test_criterion_2_threshold_replication():
    t0 = time.perf_counter()
    worst, n, labels = 0.0, 0, []
    all_ok = True
    for ex in ("1.1", "1.2", "1.3", "1.4"):
        checks, _ = run_example(ex)
        for c in checks:
            n += 1
            worst = max(worst, c.rel_error)
            all_ok &= c.passed
            if not c.passed:
                labels.append(f"{ex}: {c.label}")
    elapsed = time.perf_counter() - t0
    one_one = run_example("1.1")[0][0].computed
    one_three = run_example("1.3")[0][0].computed
    ok = all_ok and elapsed < 1.0 and abs(one_one / (1536 / 11) - 1) <= 1e-9 \
        and abs(one_three / (384 / 11) - 1) <= 1e-9
    record(2, ok, f"{n} closed-form thresholds (1536/11 -> {one_one:.10f}, 384/11 -> {one_three:.10f}, "
                  f"12√R/(2+√R), 12/(2r²+1) and both sups 12), worst rel err {worst:.1e} "
                  f"(tol 1e-9); {elapsed:.3f} s (< 1 s)" + (f"; failed: {labels}" if labels else ""))


def test_criterion_3_eigenvalue():
    t0 = time.perf_counter()
    unit = first_eigen_shoot(ones).lambda1
    w = lambda t: 4.0 / (2.0 - np.asarray(t, dtype=float)) ** 4
    s, f = first_eigen_shoot(w).lambda1, first_eigen_fd(w).lambda1
    elapsed = time.perf_counter() - t0
    e_unit = abs(unit - PI2) / PI2
    gap = abs(s - f) / s
    ok = e_unit <= 1e-8 and gap <= 1e-6 and elapsed < 1.0
    record(3, ok, f"λ1(m≡1) rel err vs π² {e_unit:.1e} (tol 1e-8); shoot/FD gap on 4/(2-t)^4 "
                  f"{gap:.1e} (tol 1e-6); {elapsed:.3f} s (< 1 s)")


def test_criterion_4_T41_window():
    c = 2.0
    delta = 0.8          # c δ² = 1.28 > 1
    R = c * delta
    bvp = ReducedBVP.from_expressions("u^3")
    rng, hyps = certify_T41("1", c, delta, R, bvp)
    e_lo, e_hi = abs(rng.lower - PI2 / 2), abs(rng.upper - PI2)
    ok = e_lo <= 1e-8 and e_hi <= 1e-8 and all(h.holds for h in hyps) and rng.upper / rng.lower == c
    record(4, ok, f"range ({rng.lower:.12f}, {rng.upper:.12f}) vs (π²/2, π²): errors {e_lo:.1e}, "
                  f"{e_hi:.1e} (tol 1e-8); δ={delta}, R=cδ={R}; "
                  + ", ".join(f"{h.id} {'holds' if h.holds else 'FAILS'}" for h in hyps)
                  + f"; upper/lower = {rng.upper / rng.lower!r}")


def _radial_rk4(N, lam, r_nodes, slope):
    """v'' = -(N-1)/r v' - lam (h = 1), v(r1) = 0, v'(r1) = slope, on the given nodes."""
    def rhs(r, y):
        return np.array([y[1], -(N - 1) / r * y[1] - lam])

    out = [0.0]
    y = np.array([0.0, slope])
    for a, b in zip(r_nodes[:-1], r_nodes[1:]):
        # substeps keep the RK4 error small on the coarse mapped grid
        m = 8
        hh = (b - a) / m
        r = a
        for _ in range(m):
            k1 = rhs(r, y)
            k2 = rhs(r + hh / 2, y + hh / 2 * k1)
            k3 = rhs(r + hh / 2, y + hh / 2 * k2)
            k4 = rhs(r + hh, y + hh * k3)
            y = y + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            r += hh
        out.append(y[0])
    return np.array(out)


def _radial_direct(N, r_nodes, lam):
    # linear in the slope: two shots fix v(r2) = 0
    a = _radial_rk4(N, lam, r_nodes, 0.0)
    b = _radial_rk4(N, lam, r_nodes, 1.0) - a
    return a - (a[-1] / b[-1]) * b


def _reduction_error(N, r1, r2, lam=1.0, n=1025):
    p = AnnularProblem.from_source(N, r1, r2, "1")
    bvp = reduce(p)
    rep = picard_solve(bvp, lam, u0=GridFunction(np.zeros(n)), damping=1.0, n=n)
    r_nodes = map_t_to_r(rep.u.t, p)
    v = _radial_direct(N, r_nodes, lam)
    return float(np.max(np.abs(rep.u.values - v))), rep


def test_criterion_5_reduction_oracle():
    err, rep = _reduction_error(3, 1.0, 2.0)
    # second independent oracle: closed form v = -r²/6 + a + b/r with v(1) = v(2) = 0
    r = map_t_to_r(rep.u.t, AnnularProblem.from_source(3, 1.0, 2.0, "1"))
    closed = -r ** 2 / 6 + 7 / 6 - 1 / r   # v(1) = v(2) = 0
    err_closed = float(np.max(np.abs(rep.u.values - closed)))
    sweep_errs = [_reduction_error(N, r1, r2)[0]
                  for N, r1, r2 in ((3, 0.5, 3.0), (4, 1.0, 2.0), (7, 1.0, 1.5), (2, 1.0, 2.0))]
    worst = max([err, err_closed] + sweep_errs)
    ok = err <= 1e-6 and err_closed <= 1e-6 and worst <= 1e-6
    record(5, ok, f"N=3, r∈[1,2], h≡1, λ=1: sup |u(t(r)) - v_RK4(r)| = {err:.1e}, vs closed form "
                  f"{err_closed:.1e}; other (N,r1,r2) worst {max(sweep_errs):.1e} (tol 1e-6)")


def test_criterion_6_closed_form_solve():
    bvp = ReducedBVP.from_expressions("1")
    n = 2049
    t = np.linspace(0, 1, n)
    exact = t * (1 - t) / 2
    pic = picard_solve(bvp, 1.0, u0=GridFunction(np.zeros(n)), damping=1.0, n=n)
    sh = shoot_solve(bvp, 1.0)
    ok = (pic.converged and pic.iterations == 1 and abs(pic.sup_norm - 0.125) <= 1e-10
          and float(np.max(np.abs(pic.u.values - exact))) <= 1e-10
          and len(sh) == 1 and abs(sh[0].sup_norm - 0.125) <= 1e-10 and abs(sh[0].slope - 0.5) <= 1e-8)
    record(6, ok, f"Picard: {pic.iterations} iteration, |sup - 0.125| = {abs(pic.sup_norm - 0.125):.1e}; "
                  f"shooting: |sup - 0.125| = {abs(sh[0].sup_norm - 0.125):.1e} (tol 1e-10), "
                  f"|slope - 1/2| = {abs(sh[0].slope - 0.5):.1e} (tol 1e-8)")


def test_criterion_7_cross_method():
    bvp = ReducedBVP.from_expressions("u/(1+u)")
    parts, ok = [], True
    for lam in (50.0, 100.0, 200.0):
        pic = picard_solve(bvp, lam)
        sh = shoot_solve(bvp, lam)
        good = pic.converged and len(sh) == 1 and sh[0].converged
        gap = abs(pic.sup_norm - sh[0].sup_norm) / sh[0].sup_norm if good else math.inf
        reps = [pic] + sh
        verified = all(verify_solution(r.u, lam, bvp).overall for r in reps if r.converged)
        quarter = min(r.min_on_quarter - (0.25 * r.sup_norm - 1e-8) for r in reps)
        ok &= good and gap <= 1e-6 and verified and quarter >= 0
        parts.append(f"λ={lam:g}: gap {gap:.1e}, verified {verified}, quarter margin {quarter:.2g}")
    record(7, ok, "; ".join(parts) + " (tol 1e-6)")


def test_criterion_8_linear_negative_control():
    bvp = ReducedBVP.from_expressions("u")
    slopes = np.geomspace(1e-4, 1e4, 64)
    below = shoot_solve(bvp, 5.0)
    ok = below == []
    worst, sign_ok = 0.0, True
    for lam in (5.0, PI2 * (1 + 1e-3), PI2 * 1.01):
        closed = slopes * math.sin(math.sqrt(lam)) / math.sqrt(lam)
        free = scan_endpoint(bvp, lam, slopes, clamp=False)
        clamped = scan_endpoint(bvp, lam, slopes)
        worst = max(worst, float(np.max(np.abs(free - closed) / np.abs(closed))))
        sign_ok &= bool(np.all(np.sign(clamped) == np.sign(closed)))
    above = shoot_solve(bvp, PI2 * (1 + 1e-3))
    ok = ok and worst <= 1e-10 and sign_ok and above == []
    record(8, ok, f"λ=5: {len(below)} positive solutions; scan u(1) vs s·sin(√λ)/√λ for λ ∈ "
                  f"{{5, π²(1+1e-3), 1.01π²}}: worst rel err {worst:.1e} (tol 1e-10), "
                  f"sign flips to negative past π²: {sign_ok}")


def test_criterion_9_property_suites():
    notes, ok = [], True
    g = np.linspace(0, 1, 101)
    T, S = np.meshgrid(g, g, indexing="ij")
    G, D = green(T, S), green_diag(S)
    quarter = (T >= 0.25) & (T <= 0.75)
    green_ok = (np.array_equal(G, G.T) and np.all(G <= D) and np.all(G[quarter] >= 0.25 * D[quarter]))
    ok &= green_ok
    notes.append(f"Green 101x101 {'ok' if green_ok else 'FAIL'}")

    worst = 0.0
    weights = [ones, lambda t: 4.0 / (2.0 - np.asarray(t)) ** 4, lambda t: 1.0 + np.asarray(t)]
    for m in weights:
        base = first_eigen_shoot(m).lambda1
        for c in (0.5, 2.0, 10.0):
            scaled = first_eigen_shoot(lambda t, c=c, m=m: c * m(t)).lambda1
            worst = max(worst, abs(scaled * c - base) / base)
    ok &= worst <= 1e-8
    notes.append(f"eigen scaling worst {worst:.1e} (tol 1e-8)")

    ratio_worst = 0.0
    for src in ("u^2/(1+u)", "u/(1+u)", "u^3 + u/2", "sqrt(u)+u/2"):
        f = parse(src, {"t", "u"})
        for c in (0.5, 2.0, 10.0):
            fc = lambda t, u, c=c, f=f: c * f.vectorized(t=t, u=u)
            for fn in (min_ratio, max_ratio):
                a, b = fn(fc, U=2.0).value, c * fn(f, U=2.0).value
                ratio_worst = max(ratio_worst, abs(a - b) / abs(b))
    ok &= ratio_worst <= 1e-14
    notes.append(f"ratio scale equivariance worst {ratio_worst:.1e}")

    corpus = []
    for ex in ("1.1", "1.2", "1.3", "1.4", "4.1", "4.2"):
        raw = packaged_problem(ex).raw
        corpus += [raw[k] for k in ("f", "q", "b") if k in raw]
        corpus += [v for v in raw.get("overrides", {}).values() if isinstance(v, str)]
    from test_exprlang import CORPUS
    corpus += CORPUS
    allowed = {"t", "u", "r", "R"}
    rt = all(parse(parse(s, allowed).pretty(), allowed) == parse(s, allowed) for s in corpus)
    ok &= rt
    notes.append(f"parser round-trip on {len(corpus)} corpus strings {'ok' if rt else 'FAIL'}")
    record(9, ok, "; ".join(notes))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
