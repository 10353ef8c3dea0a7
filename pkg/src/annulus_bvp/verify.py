"""Post-hoc checks of candidate solutions and of theorem conclusions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .certify import LambdaRange
from .solver import GridFunction, SolveReport, SolverError, apply_T, ode_residual

__all__ = ["Check", "VerificationReport", "Tolerances", "ConclusionCheck",
           "verify_solution", "check_conclusion"]


@dataclass(frozen=True)
class Tolerances:
    boundary: float = 1e-12
    nonnegative: float = 1e-12
    integral: float = 1e-8       # relative to max(1, ||u||)
    ode: float = 1e-4            # relative to λ ||q f||
    quarter: float = 1e-8


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float

    def __str__(self):
        flag = "pass" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: measured {self.measured:.3e}, tolerance {self.tolerance:.3e}"


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    trivial: bool = False

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        lines = [str(c) for c in self.checks]
        if self.trivial:
            lines.append("note: trivial solution (u = 0)")
        lines.append(f"overall: {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def verify_solution(u: GridFunction, lam: float, bvp, tolerances: Tolerances = Tolerances()
                    ) -> VerificationReport:
    tol = tolerances
    v = u.values
    norm = u.sup_norm()
    rep = VerificationReport(trivial=norm == 0.0)
    boundary = max(abs(v[0]), abs(v[-1]))
    rep.checks.append(Check("boundary zeros", boundary <= tol.boundary, boundary, tol.boundary))
    neg = max(0.0, -float(np.min(v)))
    rep.checks.append(Check("nonnegativity", neg <= tol.nonnegative * max(1.0, norm), neg,
                            tol.nonnegative * max(1.0, norm)))

    clean = GridFunction(np.maximum(v, 0.0))
    try:
        Tu = apply_T(clean, lam, bvp)
        res_int = float(np.max(np.abs(clean.values - Tu.values)))
        ode, qf = ode_residual(clean, lam, bvp)
    except SolverError:
        res_int = ode = qf = float("inf")
    int_tol = tol.integral * max(1.0, norm)
    rep.checks.append(Check("integral residual", res_int <= int_tol, res_int, int_tol))
    ode_tol = max(tol.ode * lam * qf, 1e-12)
    rep.checks.append(Check("ode residual", ode <= ode_tol, ode, ode_tol))

    quarter_min = u.min_on(0.25, 0.75)
    deficit = 0.25 * norm - quarter_min
    rep.checks.append(Check("quarter bound", deficit <= tol.quarter, deficit, tol.quarter))
    return rep


@dataclass(frozen=True)
class ConclusionCheck:
    passed: bool
    lambda_in_range: bool
    lambda_distance: float
    norm_ok: bool
    norm_margin: float
    detail: str


def check_conclusion(report: SolveReport, rng: LambdaRange) -> ConclusionCheck:
    """Test λ ∈ range and the norm conclusion (non-strict) of the theorem."""
    in_range = rng.contains(report.lam)
    dist = rng.distance_outside(report.lam)
    if rng.theorem in ("T1_1", "T1_2"):
        R = rng.inputs["R"]
        margin = R - report.sup_norm
        detail = f"sup u = {report.sup_norm:.10g} vs R = {R:.10g}"
    elif rng.theorem in ("T1_3", "T1_4"):
        r = rng.inputs["r"]
        margin = report.sup_norm - r
        detail = f"||u|| = {report.sup_norm:.10g} vs r = {r:.10g}"
    else:
        margin = report.sup_norm
        detail = f"||u|| = {report.sup_norm:.10g} (positive solution required)"
    norm_ok = margin >= 0 if rng.theorem != "T4_1" and rng.theorem != "T4_2" else margin > 0
    if not in_range:
        detail += f"; λ = {report.lam:.10g} outside range by {dist:.6g}"
    return ConclusionCheck(in_range and norm_ok and report.converged, in_range, dist,
                           norm_ok, margin, detail)
