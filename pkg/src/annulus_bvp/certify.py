"""λ-ranges guaranteeing a positive solution, and numerical hypothesis checks.

Threshold formulas, with I[a, b] = ∫_a^b s(1-s) q(s) ds:

    T1_1  λ > 16 / (m_R I[1/4, 3/4])     conclusion  sup u <= R
    T1_2  λ < 1 / (M_R I[0, 1])          conclusion  sup u <= R
    T1_3  λ > 4 / (m_r I[1/4, 3/4])      conclusion  ||u|| >= r
    T1_4  λ < 1 / (M_r I[0, 1])          conclusion  ||u|| >= r
    T4_1, T4_2   λ1(qb)/c < λ < λ1(qb)

m and M are ratio extrema of f(t, u)/u (see :mod:`ratio_bounds`); either may
be overridden. Hypotheses and limit conditions are checked by sampling only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .eigen import first_eigen_shoot
from .exprlang import Expr, ExprDomainError, parse
from .quadrature import DEFAULT_RULE, QuadratureRule, kernel_weight_integral
from .ratio_bounds import DEFAULT_GRID, max_ratio, min_ratio

__all__ = [
    "LambdaRange", "HypothesisReport", "CertificationError", "UnboundedThreshold",
    "certify_T11", "certify_T12", "certify_T13", "certify_T14",
    "certify_T41", "certify_T42", "check_limit_condition", "THEOREMS",
]

THEOREMS = ("T1_1", "T1_2", "T1_3", "T1_4", "T4_1", "T4_2")
_SLACK = 1e-12


class CertificationError(ValueError):
    pass


class UnboundedThreshold(CertificationError):
    """The ratio bound is not positive, so the threshold is +infinity."""


@dataclass
class HypothesisReport:
    id: str
    holds: bool
    witness: tuple
    margin: float
    samples: int
    detail: str = ""
    limit_estimate: Optional[float] = None
    trend: str = ""

    def __str__(self):
        status = "holds" if self.holds else "FAILS"
        t, u = self.witness
        out = f"{self.id}: {status} on {self.samples} samples; worst margin {self.margin:.6g} at t={t:.6g}, u={u:.6g}"
        if self.trend:
            out += f"; trend {self.trend}"
        if self.limit_estimate is not None and math.isfinite(self.limit_estimate):
            out += f", limit estimate {self.limit_estimate:.6g}"
        return out


@dataclass
class LambdaRange:
    theorem: str
    lower: Optional[float]
    upper: Optional[float]
    conclusion: str
    inputs: dict = field(default_factory=dict)
    hypotheses: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and not self.lower < self.upper:
            raise CertificationError(f"empty range: lower {self.lower} >= upper {self.upper}")

    def contains(self, lam: float) -> bool:
        if self.lower is not None and not lam > self.lower:
            return False
        if self.upper is not None and not lam < self.upper:
            return False
        return True

    def distance_outside(self, lam: float) -> float:
        """0 inside the open range, otherwise the distance to the nearest end."""
        if self.contains(lam):
            return 0.0
        d = []
        if self.lower is not None and lam <= self.lower:
            d.append(self.lower - lam)
        if self.upper is not None and lam >= self.upper:
            d.append(lam - self.upper)
        return max(d) if d else 0.0

    def describe(self) -> str:
        if self.lower is not None and self.upper is not None:
            rng = f"λ ∈ ({self.lower:.12g}, {self.upper:.12g})  (open interval)"
        elif self.lower is not None:
            rng = f"λ > {self.lower:.12g}  (strict)"
        else:
            rng = f"λ < {self.upper:.12g}  (strict)"
        return f"{self.theorem}: {rng}; conclusion: {self.conclusion}"


def _ratio_value(kind, override, bvp, t_range, U, grid, u_min):
    if kind == "m":
        stats = min_ratio(bvp.f, t_range, U, u_min=u_min, grid=grid)
    else:
        stats = max_ratio(bvp.f, t_range, U, u_min=u_min, grid=grid)
    used = float(override) if override is not None else stats.value
    info = {
        f"{kind}_used": used,
        f"{kind}_computed": stats.value,
        f"{kind}_argmin" if kind == "m" else f"{kind}_argmax": (stats.arg_t, stats.arg_u),
        f"{kind}_source": "override" if override is not None else "computed",
    }
    return used, stats, info


def certify_T11(R: float, m_override: Optional[float], bvp, rule: QuadratureRule = DEFAULT_RULE,
                grid=DEFAULT_GRID, u_min: Optional[float] = None) -> LambdaRange:
    if not R > 0:
        raise CertificationError("R must be positive")
    m, _, info = _ratio_value("m", m_override, bvp, (0.25, 0.75), R, grid, u_min)
    if not m > 0:
        raise UnboundedThreshold(f"m_R = {m:.6g} <= 0: threshold is unbounded")
    I = kernel_weight_integral(bvp.q, 0.25, 0.75, rule)
    rng = LambdaRange("T1_1", 16.0 / (m * I), None, "sup u <= R",
                      {"R": R, **info, "I": I, "I_interval": (0.25, 0.75)})
    rng.hypotheses.append(check_limit_condition("(5)", bvp.f))
    _note(rng)
    return rng


def certify_T12(R: float, M_override: Optional[float], bvp, rule: QuadratureRule = DEFAULT_RULE,
                grid=DEFAULT_GRID, u_min: Optional[float] = None) -> LambdaRange:
    if not R > 0:
        raise CertificationError("R must be positive")
    M, _, info = _ratio_value("M", M_override, bvp, (0.0, 1.0), R, grid, u_min)
    if not (M > 0 and math.isfinite(M)):
        raise CertificationError(f"M_R = {M!r} must be positive and finite")
    I = kernel_weight_integral(bvp.q, 0.0, 1.0, rule)
    rng = LambdaRange("T1_2", None, 1.0 / (M * I), "sup u <= R",
                      {"R": R, **info, "I": I, "I_interval": (0.0, 1.0)})
    rng.hypotheses.append(check_limit_condition("(6)", bvp.f))
    if M_override is not None and M_override < info["M_computed"]:
        rng.warnings.append(
            f"override M = {M_override:.6g} is below the sampled maximum "
            f"{info['M_computed']:.6g}; the upper threshold is not the one the bound requires")
    _note(rng)
    return rng


def certify_T13(r: float, m_override: Optional[float], bvp, rule: QuadratureRule = DEFAULT_RULE,
                grid=DEFAULT_GRID, u_min: Optional[float] = None) -> LambdaRange:
    if not r > 0:
        raise CertificationError("r must be positive")
    m, _, info = _ratio_value("m", m_override, bvp, (0.25, 0.75), r, grid, u_min)
    if not m > 0:
        raise UnboundedThreshold(f"m_r = {m:.6g} <= 0: threshold is unbounded")
    I = kernel_weight_integral(bvp.q, 0.25, 0.75, rule)
    rng = LambdaRange("T1_3", 4.0 / (m * I), None, "||u|| >= r",
                      {"r": r, **info, "I": I, "I_interval": (0.25, 0.75)})
    rng.hypotheses.append(check_limit_condition("(7)", bvp.f))
    rng.warnings.append("stated conclusion min u >= r is impossible with u(0) = 0; "
                        "reported as ||u|| >= r")
    _note(rng)
    return rng


def certify_T14(r: float, M_override: Optional[float], bvp, rule: QuadratureRule = DEFAULT_RULE,
                grid=DEFAULT_GRID, u_min: Optional[float] = None,
                alpha_beta=(0.25, 0.75)) -> LambdaRange:
    if not r > 0:
        raise CertificationError("r must be positive")
    M, _, info = _ratio_value("M", M_override, bvp, (0.0, 1.0), r, grid, u_min)
    if not (M > 0 and math.isfinite(M)):
        raise CertificationError(f"M_r = {M!r} must be positive and finite")
    I = kernel_weight_integral(bvp.q, 0.0, 1.0, rule)
    rng = LambdaRange("T1_4", None, 1.0 / (M * I), "||u|| >= r",
                      {"r": r, **info, "I": I, "I_interval": (0.0, 1.0)})
    rng.hypotheses.append(check_limit_condition("(8)", bvp.f, alpha_beta))
    rng.warnings.append("stated conclusion min u >= r is impossible with u(0) = 0; "
                        "reported as ||u|| >= r")
    _note(rng)
    return rng


def _note(rng: LambdaRange):
    for h in rng.hypotheses:
        if not h.holds:
            rng.warnings.append(f"limit condition {h.id} not confirmed by sampling: {h}")


# --- hypotheses (H1)-(H4) ----------------------------------------------------

def _as_b(b) -> Callable:
    if isinstance(b, Expr):
        return lambda t: b.vectorized(t=t)
    if isinstance(b, str):
        e = parse(b, {"t"})
        return lambda t: e.vectorized(t=t)
    if callable(b):
        return b
    val = float(b)
    return lambda t: np.full_like(np.asarray(t, dtype=float), val)


_T_SAMPLES = np.linspace(0.0, 1.0, 33)


def _inequality(hid, bvp, b, factor, u_samples, direction):
    """Check f <= factor*b*u ("le") or f >= factor*b*u ("ge") on the sample grid."""
    T, U = np.meshgrid(_T_SAMPLES, u_samples, indexing="ij")
    fv = np.asarray(bvp.f(T, U), dtype=float)
    bu = factor * np.asarray(b(T), dtype=float) * U
    margin = bu - fv if direction == "le" else fv - bu
    scale = np.maximum(np.abs(fv), np.abs(bu))
    rel = np.where(scale > 0, margin / np.where(scale > 0, scale, 1.0), 0.0)
    k = int(np.argmin(rel))
    i, j = np.unravel_index(k, rel.shape)
    holds = bool(np.all(np.isfinite(fv))) and float(rel[i, j]) >= -_SLACK
    rel_sign = "<=" if direction == "le" else ">="
    lo, hi = float(u_samples[0]), float(u_samples[-1])
    detail = f"f(t,u) {rel_sign} {factor:g}*b(t)*u sampled for u in [{lo:.3g}, {hi:.3g}]"
    return HypothesisReport(hid, holds, (float(T[i, j]), float(U[i, j])), float(margin[i, j]),
                            int(rel.size), detail)


def _below(delta):
    # (0, delta): geometric from 1e-8 delta up to but excluding delta
    return delta * np.geomspace(1e-8, 1.0, 257)[:-1]


def _above(R, probe=10.0):
    return np.geomspace(R, probe * R, 256)


def _eigen_window(theorem, b, c, delta, R, bvp, eigen_kw):
    if not c > 1:
        raise CertificationError(f"c must exceed 1, got {c}")
    if not 0 < delta < R:
        raise CertificationError("need 0 < delta < R")
    bf = _as_b(b)
    eig = first_eigen_shoot(bvp.m_weight(bf), **(eigen_kw or {}))
    lam1 = eig.lambda1
    rng = LambdaRange(theorem, lam1 / c, lam1, "positive solution",
                      {"lambda1_qb": lam1, "c": c, "delta": delta, "R": R,
                       "eigen_residual": eig.residual})
    return rng, bf


def certify_T41(b, c: float, delta: float, R: float, bvp, eigen_kw: Optional[dict] = None):
    """Window (λ1(qb)/c, λ1(qb)) with (H1) on (0, δ) and (H2) on [R, 10R]."""
    rng, bf = _eigen_window("T4_1", b, c, delta, R, bvp, eigen_kw)
    h1 = _inequality("H1", bvp, bf, 1.0, _below(delta), "le")
    h2 = _inequality("H2", bvp, bf, c, _above(R), "ge")
    rng.hypotheses.extend([h1, h2])
    for h in (h1, h2):
        if not h.holds:
            rng.warnings.append(f"hypothesis {h}")
    return rng, [h1, h2]


def certify_T42(b, c: float, delta: float, R: float, bvp, eigen_kw: Optional[dict] = None):
    """Window (λ1(qb)/c, λ1(qb)) with (H3) on [R, 10R] and (H4) on (0, δ)."""
    rng, bf = _eigen_window("T4_2", b, c, delta, R, bvp, eigen_kw)
    h3 = _inequality("H3", bvp, bf, 1.0, _above(R), "le")
    h4 = _inequality("H4", bvp, bf, c, _below(delta), "ge")
    rng.hypotheses.extend([h3, h4])
    for h in (h3, h4):
        if not h.holds:
            rng.warnings.append(f"hypothesis {h}")
    return rng, [h3, h4]


# --- limit conditions (5)-(8) ------------------------------------------------

_LIMITS = {
    # id: (ladder direction, target)
    "(5)": ("zero", "to_zero"),
    "(6)": ("zero", "to_infinity"),
    "(7)": ("infinity", "to_zero"),
    "(8)": ("infinity", "to_infinity"),
}


def check_limit_condition(which: str, f, t_range=(0.0, 1.0), n_t: int = 33) -> HypothesisReport:
    """Empirical trend of f(t, u)/u along a geometric u-ladder.

    The ladder is u = 10^-k, k = 1..12 (conditions (5), (6)) or u = 10^k,
    k = 1..8 ((7), (8)). The worst case over a t-grid is taken at each rung
    (the sup for a limit of 0, the inf for a limit of infinity). The trend is
    read off the log-log slope of the last four rungs. This is a heuristic.
    """
    if which not in _LIMITS:
        raise ValueError(f"unknown limit condition {which!r}")
    direction, target = _LIMITS[which]
    fc = f if not isinstance(f, Expr) else (lambda t, u: f.vectorized(t=t, u=u))
    us = 10.0 ** -np.arange(1, 13) if direction == "zero" else 10.0 ** np.arange(1, 9)
    ts = np.linspace(t_range[0], t_range[1], n_t)
    T, U = np.meshgrid(ts, us, indexing="ij")
    try:
        with np.errstate(over="ignore"):
            ratio = np.asarray(fc(T, U), dtype=float) / U
    except (ExprDomainError, ArithmeticError) as exc:
        raise CertificationError(f"domain error on the limit ladder: {exc}") from None
    if target == "to_zero":
        idx = np.argmax(ratio, axis=0)
    else:
        idx = np.argmin(ratio, axis=0)
    worst = ratio[idx, np.arange(us.size)]
    worst_t = ts[idx]

    tail_u, tail_r = us[-4:], worst[-4:]
    if np.all(tail_r == 0):
        trend, estimate = "to_zero", 0.0
    elif np.all(tail_r > 0) and np.all(np.isfinite(tail_r)):
        slope = np.polyfit(np.log(tail_u), np.log(tail_r), 1)[0]
        if direction == "infinity":
            slope = -slope
        # slope now > 0 means the ratio shrinks as the ladder advances
        if slope > 0.1:
            trend, estimate = "to_zero", 0.0
        elif slope < -0.1:
            trend, estimate = "to_infinity", math.inf
        else:
            trend, estimate = "finite", float(tail_r[-1])
    elif np.any(np.isposinf(tail_r)) and not np.any(np.isnan(tail_r)):
        trend, estimate = "to_infinity", math.inf
    else:
        trend, estimate = "indeterminate", float("nan")

    holds = trend == target
    k = us.size - 1
    margin = float(worst[k])
    detail = (f"{which}: f/u along u = {us[0]:.0e} .. {us[-1]:.0e}, "
              f"t in [{t_range[0]:g}, {t_range[1]:g}]; expected {target}, observed {trend}")
    return HypothesisReport(which, holds, (float(worst_t[k]), float(us[k])), margin,
                            int(ratio.size), detail, limit_estimate=estimate, trend=trend)
