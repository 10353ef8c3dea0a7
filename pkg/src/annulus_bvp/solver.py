"""Positive solutions of u'' + λ q(t) f(t, u) = 0, u(0) = u(1) = 0.

Two routes:

* Picard iteration on the integral operator
  (Tu)(t) = λ ∫ G(t, s) q(s) f(s, u(s)) ds, discretised on a uniform grid
  with per-cell Gauss-Legendre quadrature (grid nodes are cell edges, so the
  kink of G at s = t_i is always a panel boundary).
* Shooting on the initial slope with classical RK4, scanning slopes
  geometrically and refining each bracketed sign change of u(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .exprlang import ExprDomainError

__all__ = [
    "GridFunction", "SolveReport", "SolverConfig", "SolverError", "SweepRow",
    "apply_T", "picard_solve", "shoot_solve", "scan_endpoint", "sweep",
    "ode_residual", "default_initial_guess",
]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the uniform grid t_i = i/(n-1), i = 0..n-1."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("a GridFunction needs at least 3 values")
        if not np.all(np.isfinite(v)):
            raise ValueError("GridFunction values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, fn, n: int) -> "GridFunction":
        t = np.linspace(0.0, 1.0, n)
        return cls(np.broadcast_to(np.asarray(fn(t), dtype=float), t.shape))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_on(self, a: float = 0.25, b: float = 0.75) -> float:
        t = self.t
        # nodes within a rounding hair of the interval ends count as inside
        mask = (t >= a - 1e-12) & (t <= b + 1e-12)
        return float(np.min(self.values[mask]))


@dataclass
class SolveReport:
    u: GridFunction
    sup_norm: float
    min_on_quarter: float
    method: str
    lam: float
    iterations: int
    converged: bool
    residual_integral: float
    residual_ode: float
    slope: Optional[float] = None
    message: str = ""

    @property
    def nontrivial(self) -> bool:
        return self.sup_norm > 1e-12


@dataclass(frozen=True)
class SolverConfig:
    n: int = 2049
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 10_000
    points_per_cell: int = 5
    interpolation: str = "cubic"
    steps: int = 4096
    slope_range: tuple = (1e-4, 1e4)
    n_scan: int = 64
    shoot_tol: float = 1e-10
    integral_tol: float = 1e-8


DEFAULT_CONFIG = SolverConfig()


def default_initial_guess(n: int) -> GridFunction:
    """4 t (1 - t): positive inside, zero at the ends, sup norm 1."""
    return GridFunction.from_callable(lambda t: 4.0 * t * (1.0 - t), n)


# --- the integral operator -------------------------------------------------

def _locate_domain_error(bvp, s, us):
    for si, ui in zip(s.ravel(), us.ravel()):
        try:
            val = bvp.f_scalar(float(si), float(ui))
        except (ExprDomainError, ArithmeticError, ValueError) as exc:
            return f"f({si!r}, {ui!r}): {exc}"
        if not math.isfinite(val):
            return f"f({si!r}, {ui!r}) = {val}"
    return "location not found"


def _eval_g(bvp, s, us):
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            g = np.asarray(bvp.q(s), dtype=float) * np.asarray(bvp.f(s, us), dtype=float)
    except (ExprDomainError, ArithmeticError, ValueError):
        raise SolverError("nonlinearity domain error at " + _locate_domain_error(bvp, s, us)) from None
    g = np.broadcast_to(g, s.shape)
    if not np.all(np.isfinite(g)):
        raise SolverError("non-finite q*f at " + _locate_domain_error(bvp, s, us))
    return g


def apply_T(u: GridFunction, lam: float, bvp, points_per_cell: int = 5,
            interpolation: str = "cubic") -> GridFunction:
    """(Tu)(t_i) at every grid node.

    u between nodes comes from a not-a-knot cubic spline (``"cubic"``) or
    piecewise-linear interpolation (``"linear"``); interpolated values are
    clamped at 0 since f is only defined for u >= 0.
    """
    vals = u.values
    scale = max(1.0, u.sup_norm())
    if np.min(vals) < -1e-12 * scale:
        raise SolverError(f"apply_T needs u >= 0; min u = {np.min(vals):.3e}")
    t = u.t
    x, w = np.polynomial.legendre.leggauss(points_per_cell)
    half = 0.5 * np.diff(t)
    s = 0.5 * (t[:-1] + t[1:])[:, None] + half[:, None] * x[None, :]
    ws = half[:, None] * w[None, :]
    if interpolation == "cubic":
        us = CubicSpline(t, vals)(s)
    elif interpolation == "linear":
        us = np.interp(s, t, vals)
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")
    us = np.maximum(us, 0.0)
    g = _eval_g(bvp, s, us)
    left = np.concatenate(([0.0], np.cumsum(np.sum(ws * s * g, axis=1))))
    right = np.concatenate(([0.0], np.cumsum(np.sum(ws * (1.0 - s) * g, axis=1))))
    out = lam * ((1.0 - t) * left + t * (right[-1] - right))
    out[0] = 0.0
    out[-1] = 0.0
    return GridFunction(out)


def _d2_fourth_order(u: GridFunction, lam: float, bvp) -> np.ndarray:
    """Fourth-order centred u'' at interior nodes.

    The stencil needs one node beyond each wall; the ghost value comes from
    the Taylor expansion u(-h) = -u(h) + h^2 u''(0) with u''(0) = -λ q f(0, 0)
    read off the equation (likewise at t = 1).
    """
    v = u.values
    h = u.h
    ends = _eval_g(bvp, np.array([0.0, 1.0]), np.zeros(2))
    g0, g1 = -lam * ends[0], -lam * ends[1]
    ext = np.concatenate(([2.0 * v[0] - v[1] + h * h * g0], v, [2.0 * v[-1] - v[-2] + h * h * g1]))
    return (-ext[:-4] + 16.0 * ext[1:-3] - 30.0 * ext[2:-2] + 16.0 * ext[3:-1] - ext[4:]) / (12.0 * h * h)


def ode_residual(u: GridFunction, lam: float, bvp) -> tuple[float, float]:
    """(sup |u'' + λ q f|, sup |q f|) at interior nodes, u'' by centred differences.

    Grids too small for the five-point stencil fall back to three points.
    """
    t = u.t[1:-1]
    v = u.values
    if u.n >= 5:
        d2 = _d2_fourth_order(u, lam, bvp)
    else:
        d2 = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (u.h * u.h)
    qf = _eval_g(bvp, t, np.maximum(v[1:-1], 0.0))
    return float(np.max(np.abs(d2 + lam * qf))), float(np.max(np.abs(qf)))


# --- Picard ------------------------------------------------------------------

_COLLAPSE = 1e3


def picard_solve(bvp, lam: float, u0: Optional[GridFunction] = None, damping: float = 0.5,
                 tol: float = 1e-10, max_iter: int = 10_000, n: int = 2049,
                 points_per_cell: int = 5, interpolation: str = "cubic") -> SolveReport:
    """Damped fixed-point iteration u <- (1 - d) u + d T u.

    Stops when ||u - Tu|| <= tol * max(1, ||u||). Non-convergence is reported
    in the result, not raised. When T0 = 0 and the iterates shrink to the
    size of the tolerance, the result is the trivial fixed point u = 0.
    """
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    u = u0 if u0 is not None else default_initial_guess(n)
    if np.min(u.values) < 0:
        raise ValueError("initial guess must be non-negative")
    kw = dict(points_per_cell=points_per_cell, interpolation=interpolation)
    Tu = apply_T(u, lam, bvp, **kw)
    converged = False
    message = ""
    it = 0
    while True:
        res = float(np.max(np.abs(u.values - Tu.values)))
        if not math.isfinite(res):
            raise SolverError("NaN contamination in Picard iteration")
        if res <= tol * max(1.0, u.sup_norm()):
            converged = True
            break
        if it >= max_iter:
            message = f"no convergence after {max_iter} iterations (residual {res:.3e})"
            break
        new = (1.0 - damping) * u.values + damping * Tu.values
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > 1e150:
            message = f"iterates diverged after {it + 1} iterations"
            break
        u = GridFunction(new)
        Tu = apply_T(u, lam, bvp, **kw)
        it += 1
    if converged and 0 < u.sup_norm() <= _COLLAPSE * tol:
        zero = GridFunction(np.zeros(u.n))
        if apply_T(zero, lam, bvp, **kw).sup_norm() == 0.0:
            u, res = zero, 0.0
            message = "iterates collapsed onto the trivial fixed point u = 0"
    ode, _ = ode_residual(u, lam, bvp)
    return SolveReport(u=u, sup_norm=u.sup_norm(), min_on_quarter=u.min_on(),
                       method="picard", lam=lam, iterations=it, converged=converged,
                       residual_integral=res, residual_ode=ode, message=message)


# --- shooting ----------------------------------------------------------------

def _stage_weights(bvp, steps):
    h = 1.0 / steps
    t = np.arange(steps + 1) * h
    t[-1] = 1.0
    tm = t[:-1] + 0.5 * h
    q0 = np.broadcast_to(np.asarray(bvp.q(t), dtype=float), t.shape)
    qh = np.broadcast_to(np.asarray(bvp.q(tm), dtype=float), tm.shape)
    return t, tm, q0, qh


def scan_endpoint(bvp, lam: float, slopes, steps: int = 4096, clamp: bool = True) -> np.ndarray:
    """u(1) for each initial slope, integrating all slopes at once.

    With ``clamp`` (the setting the solver uses) f is evaluated at max(u, 0),
    so a trajectory that dips below zero continues as a straight line.
    ``clamp=False`` integrates the equation as written, which needs f to be
    defined for negative u. Trajectories that overflow give NaN.
    """
    s = np.asarray(slopes, dtype=float)
    t, tm, q0, qh = _stage_weights(bvp, steps)
    h = 1.0 / steps
    u = np.zeros_like(s)
    v = s.copy()

    def acc(tk, qk, uk):
        return -lam * qk * np.asarray(bvp.f(tk, np.maximum(uk, 0.0) if clamp else uk), dtype=float)

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1u, k1v = v, acc(t[k], q0[k], u)
            k2u, k2v = v + 0.5 * h * k1v, acc(tm[k], qh[k], u + 0.5 * h * k1u)
            k3u, k3v = v + 0.5 * h * k2v, acc(tm[k], qh[k], u + 0.5 * h * k2u)
            k4u, k4v = v + h * k3v, acc(t[k + 1], q0[k + 1], u + h * k3u)
            u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            bad = ~np.isfinite(u) | ~np.isfinite(v)
            if np.any(bad):
                u = np.where(bad, np.nan, u)
                v = np.where(bad, np.nan, v)
    return u


def _shoot_path(bvp, lam, slope, steps, t, tm, q0, qh, keep):
    f = bvp.f_scalar
    h = 1.0 / steps
    h2 = 0.5 * h
    h6 = h / 6.0
    nl = -lam
    u, v = 0.0, float(slope)
    path = [0.0] if keep else None
    for k in range(steps):
        tk, tmk, tk1 = t[k], tm[k], t[k + 1]
        k1u = v
        k1v = nl * q0[k] * f(tk, u if u > 0.0 else 0.0)
        a = u + h2 * k1u
        k2u = v + h2 * k1v
        k2v = nl * qh[k] * f(tmk, a if a > 0.0 else 0.0)
        a = u + h2 * k2u
        k3u = v + h2 * k2v
        k3v = nl * qh[k] * f(tmk, a if a > 0.0 else 0.0)
        a = u + h * k3u
        k4u = v + h * k3v
        k4v = nl * q0[k + 1] * f(tk1, a if a > 0.0 else 0.0)
        u += h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if keep:
            path.append(u)
        elif not (abs(u) < 1e300):
            return math.nan, None
    return u, path


def shoot_solve(bvp, lam: float, slope_range=(1e-4, 1e4), n_scan: int = 64,
                tol: float = 1e-10, steps: int = 4096,
                integral_tol: float = 1e-8) -> list[SolveReport]:
    """All positive solutions bracketed by a geometric slope scan.

    Each sign change of u(1) between neighbouring scan slopes is refined with
    Brent's bracketing method. Reports are returned in increasing slope order;
    trajectories that are not non-negative are dropped.
    """
    s_lo, s_hi = map(float, slope_range)
    if not 0 < s_lo < s_hi:
        raise ValueError("slope_range must satisfy 0 < s_lo < s_hi")
    if n_scan < 2:
        raise ValueError("n_scan must be >= 2")
    slopes = np.geomspace(s_lo, s_hi, n_scan)
    ends = scan_endpoint(bvp, lam, slopes, steps)
    t, tm, q0, qh = _stage_weights(bvp, steps)
    t, tm, q0, qh = t.tolist(), tm.tolist(), q0.tolist(), qh.tolist()

    def endpoint(s):
        return _shoot_path(bvp, lam, s, steps, t, tm, q0, qh, keep=False)[0]

    roots = []
    for k in range(n_scan - 1):
        a, b = ends[k], ends[k + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(slopes[k])
        elif a * b < 0.0:
            fa, fb = endpoint(slopes[k]), endpoint(slopes[k + 1])
            if not (math.isfinite(fa) and math.isfinite(fb)) or fa * fb > 0:
                continue
            roots.append(brentq(endpoint, slopes[k], slopes[k + 1], xtol=1e-300,
                                rtol=4 * np.finfo(float).eps, maxiter=300))
    if n_scan and ends[-1] == 0.0:
        roots.append(slopes[-1])

    reports = []
    for s in roots:
        u_end, path = _shoot_path(bvp, lam, s, steps, t, tm, q0, qh, keep=True)
        vals = np.asarray(path)
        if not np.all(np.isfinite(vals)):
            continue
        norm = float(np.max(np.abs(vals)))
        if np.min(vals[1:-1]) < -tol * max(1.0, norm):
            continue
        boundary_ok = abs(u_end) <= tol * max(1.0, norm)
        vals = np.maximum(vals, 0.0)
        vals[-1] = 0.0
        u = GridFunction(vals)
        Tu = apply_T(u, lam, bvp)
        res_int = float(np.max(np.abs(u.values - Tu.values)))
        ode, _ = ode_residual(u, lam, bvp)
        converged = boundary_ok and res_int <= integral_tol * max(1.0, u.sup_norm())
        msg = "" if boundary_ok else f"|u(1)| = {abs(u_end):.3e} above tolerance"
        reports.append(SolveReport(u=u, sup_norm=u.sup_norm(), min_on_quarter=u.min_on(),
                                   method="shoot", lam=lam, iterations=0, converged=converged,
                                   residual_integral=res_int, residual_ode=ode, slope=float(s),
                                   message=msg))
    return reports


# --- sweeps ------------------------------------------------------------------

@dataclass
class SweepRow:
    lam: float
    n_solutions: int
    sup_norms: list = field(default_factory=list)
    min_quarters: list = field(default_factory=list)
    error: str = ""


def _solve_one(bvp, lam, method, config: SolverConfig) -> list[SolveReport]:
    if method == "picard":
        rep = picard_solve(bvp, lam, damping=config.damping, tol=config.tol,
                           max_iter=config.max_iter, n=config.n,
                           points_per_cell=config.points_per_cell,
                           interpolation=config.interpolation)
        return [rep] if rep.converged and rep.nontrivial else []
    if method == "shoot":
        reps = shoot_solve(bvp, lam, slope_range=config.slope_range, n_scan=config.n_scan,
                           tol=config.shoot_tol, steps=config.steps,
                           integral_tol=config.integral_tol)
        return [r for r in reps if r.converged]
    raise ValueError(f"unknown method {method!r}")


def sweep(bvp, lambdas: Sequence[float], method: str = "shoot",
          config: SolverConfig = DEFAULT_CONFIG) -> list[SweepRow]:
    """Independent solves per λ; rows come back in input order."""
    rows = []
    for lam in lambdas:
        lam = float(lam)
        if not (math.isfinite(lam) and lam > 0):
            rows.append(SweepRow(lam, 0, error="lambda must be finite and positive"))
            continue
        try:
            reps = _solve_one(bvp, lam, method, config)
        except (SolverError, ArithmeticError, ValueError) as exc:
            rows.append(SweepRow(lam, 0, error=str(exc)))
            continue
        rows.append(SweepRow(lam, len(reps), [r.sup_norm for r in reps],
                             [r.min_on_quarter for r in reps]))
    return rows
