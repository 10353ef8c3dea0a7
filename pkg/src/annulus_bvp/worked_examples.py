"""Built-in replications of the six worked examples.

Each replication returns a list of :class:`ThresholdCheck` comparing a
closed-form threshold with the value computed through :mod:`certify`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import certify
from .problem import packaged_problem

__all__ = ["ThresholdCheck", "EXAMPLE_IDS", "run_example", "REL_TOL"]

REL_TOL = 1e-9
EXAMPLE_IDS = ("1.1", "1.2", "1.3", "1.4", "4.1", "4.2")


@dataclass(frozen=True)
class ThresholdCheck:
    label: str
    expected: float
    computed: float
    rel_tol: float = REL_TOL

    @property
    def rel_error(self) -> float:
        if self.expected == 0:
            return abs(self.computed)
        return abs(self.computed - self.expected) / abs(self.expected)

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.rel_tol

    def __str__(self):
        flag = "ok  " if self.passed else "FAIL"
        return (f"[{flag}] {self.label}: expected {self.expected:.12g}, "
                f"computed {self.computed:.12g} (rel err {self.rel_error:.2e})")


def _ex11():
    p = packaged_problem("1.1")
    rng = certify.certify_T11(p.R, p.override("m"), p.bvp)
    return [ThresholdCheck("λ_R lower bound 1536/11", 1536 / 11, rng.lower)], rng


def _ex12():
    p = packaged_problem("1.2")
    M_expr = p.overrides["M"]
    checks = []
    for R in (0.25, 1.0, 4.0, 5.1897, 100.0):
        rng = certify.certify_T12(R, M_expr(R=R), p.bvp)
        checks.append(ThresholdCheck(f"λ_R upper bound 12√R/(2+√R) at R={R:g}",
                                     12 * math.sqrt(R) / (2 + math.sqrt(R)), rng.upper))
    values = [c.computed for c in checks]
    checks.append(ThresholdCheck("every sampled bound lies below the supremum 12",
                                 1.0, 1.0 if max(values) < 12.0 else 0.0))
    big = 1e20
    far = certify.certify_T12(big, M_expr(R=big), p.bvp)
    checks.append(ThresholdCheck("supremum 12 approached as R -> ∞ (R = 1e20)", 12.0, far.upper))
    return checks, certify.certify_T12(p.R, p.override("M"), p.bvp)


def _ex13():
    p = packaged_problem("1.3")
    rng = certify.certify_T13(p.r, p.override("m"), p.bvp)
    return [ThresholdCheck("λ_r lower bound 384/11", 384 / 11, rng.lower)], rng


def _ex14():
    p = packaged_problem("1.4")
    M_expr = p.overrides["M"]
    checks = []
    for r in (0.5, 1.0, 2.0, 8.2207e-10):
        rng = certify.certify_T14(r, M_expr(r=r), p.bvp)
        checks.append(ThresholdCheck(f"λ_r upper bound 12/(2r²+1) at r={r:g}",
                                     12 / (2 * r * r + 1), rng.upper))
    tiny = certify.certify_T14(1e-6, M_expr(r=1e-6), p.bvp)
    checks.append(ThresholdCheck("maximum 12 attained as r -> 0 (r = 1e-6)", 12.0, tiny.upper))
    main = certify.certify_T14(p.r, p.override("M"), p.bvp)
    return checks, main


def _ex41():
    p = packaged_problem("4.1")
    rng, hyps = certify.certify_T41(p.b, p.c, p.delta, p.R, p.bvp)
    pi2 = math.pi ** 2
    checks = [ThresholdCheck("lower end π²/c", pi2 / p.c, rng.lower),
              ThresholdCheck("upper end π²", pi2, rng.upper)]
    for h in hyps:
        checks.append(ThresholdCheck(f"{h.id} holds by sampling", 1.0, 1.0 if h.holds else 0.0))
    return checks, rng


def _ex42():
    p = packaged_problem("4.2")
    rng, hyps = certify.certify_T42(p.b, p.c, p.delta, p.R, p.bvp)
    pi2 = math.pi ** 2
    checks = [ThresholdCheck("lower end δ²π²", p.delta ** 2 * pi2, rng.lower),
              ThresholdCheck("upper end π²", pi2, rng.upper)]
    for h in hyps:
        checks.append(ThresholdCheck(f"{h.id} holds by sampling", 1.0, 1.0 if h.holds else 0.0))
    return checks, rng


_RUNNERS = {"1.1": _ex11, "1.2": _ex12, "1.3": _ex13, "1.4": _ex14, "4.1": _ex41, "4.2": _ex42}


def run_example(example_id: str):
    """Returns (checks, representative LambdaRange)."""
    try:
        runner = _RUNNERS[example_id]
    except KeyError:
        raise KeyError(f"unknown example id {example_id!r}; choose from {', '.join(EXAMPLE_IDS)}") from None
    return runner()
