import math

import numpy as np
import pytest

from annulus_bvp.certify import LambdaRange, certify_T11, certify_T13
from annulus_bvp.reduction import ReducedBVP
from annulus_bvp.solver import GridFunction, SolveReport, picard_solve, shoot_solve
from annulus_bvp.verify import Tolerances, check_conclusion, verify_solution

T = np.linspace(0, 1, 513)


def bvp(f, q="1"):
    return ReducedBVP.from_expressions(f, q)


def report(sup, lam, converged=True):
    u = GridFunction(4 * sup * T * (1 - T))
    return SolveReport(u, u.sup_norm(), u.min_on(), "picard", lam, 1, converged, 0.0, 0.0)


def test_trivial_solution():
    rep = verify_solution(GridFunction(np.zeros(65)), 7.0, bvp("u^2/(1+u)"))
    assert rep.overall and rep.trivial
    assert "trivial" in rep.summary()


def test_closed_form_solution():
    rep = verify_solution(GridFunction(T * (1 - T) / 2), 1.0, bvp("1"))
    assert rep.overall
    assert rep["integral residual"].measured <= 1e-10
    assert rep["ode residual"].measured <= 1e-10


def test_boundary_failure():
    rep = verify_solution(GridFunction(T.copy()), 1.0, bvp("1"))
    assert not rep["boundary zeros"].passed
    assert rep["boundary zeros"].measured == 1.0
    assert not rep.overall


def test_negative_values_flagged():
    rep = verify_solution(GridFunction(-T * (1 - T)), 1.0, bvp("1"))
    assert not rep["nonnegativity"].passed


def test_quarter_bound_failure():
    # a spike near t = 0.1 is not concave and violates the quarter bound
    v = np.exp(-((T - 0.1) / 0.02) ** 2)
    v[0] = v[-1] = 0
    rep = verify_solution(GridFunction(v), 1.0, bvp("u"))
    assert not rep["quarter bound"].passed


@pytest.mark.parametrize("f,lam", [("u/(1+u)", 50.0), ("u/(1+u)", 200.0), ("1", 3.0),
                                   ("u^3+u/2", 2.0), ("u/(1+u)", 35.0)])
def test_solver_output_verifies(f, lam):
    b = bvp(f)
    reps = shoot_solve(b, lam)
    p = picard_solve(b, lam)
    if p.converged and p.nontrivial:
        reps.append(p)
    assert reps
    for r in reps:
        v = verify_solution(r.u, lam, b)
        assert v.overall, v.summary()
        assert r.min_on_quarter - 0.25 * r.sup_norm > 0


def test_conclusion_examples():
    rng = certify_T11(1.0, 1.0, bvp("u^2/(1+u)"))
    ok = check_conclusion(report(1.0, 150.0), rng)  # sup exactly R
    assert ok.passed and ok.norm_margin == 0.0
    outside = check_conclusion(report(0.5, 100.0), rng)
    assert not outside.passed and not outside.lambda_in_range
    assert outside.lambda_distance == pytest.approx(1536 / 11 - 100.0)
    assert not check_conclusion(report(0.5, 150.0, converged=False), rng).passed


def test_example_13_reports_margin():
    b = bvp("u/(1+u)")
    rng = certify_T13(0.0108, 1.0, b)
    rep = picard_solve(b, 35.0)
    c = check_conclusion(rep, rng)
    assert c.lambda_in_range
    assert c.norm_margin == pytest.approx(rep.sup_norm - 0.0108)
    assert "0.0108" in c.detail
