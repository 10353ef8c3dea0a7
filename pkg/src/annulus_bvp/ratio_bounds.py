"""Extremal values of the ratio f(t, u)/u over a rectangle [a, b] x [u_min, U].

The grid scan uses a linear t-grid and a u-grid that is geometric whenever
U/u_min exceeds 100 (so behaviour near u -> 0 is resolved), followed by one
golden-section pass in each coordinate around the grid extremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exprlang import Expr

__all__ = ["RatioStats", "RatioError", "min_ratio", "max_ratio", "DEFAULT_GRID"]

DEFAULT_GRID = (64, 256)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class RatioError(ValueError):
    pass


@dataclass(frozen=True)
class RatioStats:
    value: float
    arg_t: float
    arg_u: float
    kind: str
    t_range: tuple
    u_range: tuple
    grid: tuple
    refined: bool
    from_limit: bool = False


def _as_callable(f) -> Callable:
    if isinstance(f, Expr):
        return lambda t, u: f.vectorized(t=t, u=u)
    return f


def _golden(phi: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
            max_iter: int = 200) -> tuple[float, float]:
    """Minimise phi on [lo, hi] by golden-section search; returns (x, phi(x))."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = phi(d)
    return (c, fc) if fc <= fd else (d, fd)


def _extremum(f, t_range, U, u_min, grid, sign, zero_limit):
    a, b = map(float, t_range)
    if not a < b:
        raise RatioError("t_range must satisfy a < b")
    if u_min is None:
        u_min = 1e-8 * U
    if not 0 < u_min < U:
        raise RatioError("need 0 < u_min < U")
    n_t, n_u = (int(g) for g in grid)
    if n_t < 2 or n_u < 2:
        raise RatioError("grid must have at least 2 points per axis")
    fc = _as_callable(f)
    ts = np.linspace(a, b, n_t)
    us = np.geomspace(u_min, U, n_u) if U / u_min > 100 else np.linspace(u_min, U, n_u)
    T, Uu = np.meshgrid(ts, us, indexing="ij")
    ratio = np.asarray(fc(T, Uu), dtype=float) / Uu
    if not np.all(np.isfinite(ratio)):
        i, j = np.unravel_index(int(np.argmax(~np.isfinite(ratio))), ratio.shape)
        raise RatioError(f"non-finite ratio at t={ts[i]!r}, u={us[j]!r}")
    # argmin of the signed ratio picks the lowest flat index on ties
    k = int(np.argmin(sign * ratio))
    i, j = np.unravel_index(k, ratio.shape)
    best_t, best_u, best = float(ts[i]), float(us[j]), float(sign * ratio[i, j])

    def signed(t, u):
        val = float(np.asarray(fc(np.float64(t), np.float64(u)), dtype=float)) / u
        if not math.isfinite(val):
            return math.inf
        return sign * val

    t_lo, t_hi = ts[max(i - 1, 0)], ts[min(i + 1, n_t - 1)]
    tt, vt = _golden(lambda t: signed(t, best_u), t_lo, t_hi)
    if vt < best:
        best_t, best = tt, vt
    u_lo, u_hi = us[max(j - 1, 0)], us[min(j + 1, n_u - 1)]
    uu, vu = _golden(lambda u: signed(best_t, u), u_lo, u_hi)
    if vu < best:
        best_u, best = uu, vu

    from_limit = False
    if zero_limit is not None and sign * zero_limit < best:
        best, best_u, from_limit = sign * float(zero_limit), 0.0, True
    return RatioStats(
        value=sign * best, arg_t=best_t, arg_u=best_u,
        kind="min" if sign > 0 else "max", t_range=(a, b), u_range=(u_min, U),
        grid=(n_t, n_u), refined=True, from_limit=from_limit,
    )


def min_ratio(f, t_range=(0.25, 0.75), U: float = 1.0, u_min: Optional[float] = None,
              grid=DEFAULT_GRID, zero_limit: Optional[float] = None) -> RatioStats:
    """Minimum of f(t, u)/u over t in t_range, u in [u_min, U].

    ``u_min`` defaults to 1e-8 U. ``zero_limit``, when given, is the analytic
    value of the ratio as u -> 0 and competes with the sampled minimum.
    """
    return _extremum(f, t_range, U, u_min, grid, 1.0, zero_limit)


def max_ratio(f, t_range=(0.0, 1.0), U: float = 1.0, u_min: Optional[float] = None,
              grid=DEFAULT_GRID, zero_limit: Optional[float] = None) -> RatioStats:
    """Maximum of f(t, u)/u; see :func:`min_ratio`."""
    return _extremum(f, t_range, U, u_min, grid, -1.0, zero_limit)
