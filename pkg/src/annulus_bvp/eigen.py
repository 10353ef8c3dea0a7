"""First eigenpair of -u'' = λ m(t) u, u(0) = u(1) = 0.

Two independent routes:

* :func:`first_eigen_shoot` integrates u(0) = 0, u'(0) = 1 with RK4 and
  brackets λ by whether the trajectory stays positive on (0, 1]; the bracket
  is bisected and then polished with Brent's method on u(1; λ).
* :func:`first_eigen_fd` uses the 3-point finite-difference matrix and
  inverse power iteration, with Richardson extrapolation over n and 2n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .solver import GridFunction

__all__ = ["EigenResult", "EigenError", "first_eigen_shoot", "first_eigen_fd"]


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenResult:
    lambda1: float
    phi: GridFunction
    method: str
    residual: float
    grid_n: int
    details: dict = field(default_factory=dict)


def _sample_weight(m, steps):
    h = 1.0 / steps
    t = np.arange(steps + 1) * h
    t[-1] = 1.0
    m0 = np.broadcast_to(np.asarray(m(t), dtype=float), t.shape)
    mh = np.broadcast_to(np.asarray(m(t[:-1] + 0.5 * h), dtype=float), (steps,))
    for arr, where in ((m0, t), (mh, t[:-1] + 0.5 * h)):
        if not np.all(np.isfinite(arr)):
            raise EigenError("weight m(t) is not finite")
        if np.any(arr < 0):
            i = int(np.argmin(arr))
            raise EigenError(f"weight m(t) negative at t={where[i]!r}")
    if not np.any(m0[1:-1] > 0) and not np.any(mh > 0):
        raise EigenError("weight m(t) vanishes at every sample; no eigenvalue")
    return t, m0.tolist(), mh.tolist()


def _rk4_linear(lam, m0, mh, steps, keep=False, early_exit=True):
    """Integrate u'' = -lam m u from (0, 1). Returns (u(1), crossed, path)."""
    h = 1.0 / steps
    h2 = 0.5 * h
    h6 = h / 6.0
    u, v = 0.0, 1.0
    crossed = False
    path = [0.0] if keep else None
    for k in range(steps):
        a0 = -lam * m0[k]
        ah = -lam * mh[k]
        a1 = -lam * m0[k + 1]
        k1u, k1v = v, a0 * u
        k2u = v + h2 * k1v
        k2v = ah * (u + h2 * k1u)
        k3u = v + h2 * k2v
        k3v = ah * (u + h2 * k2u)
        k4u = v + h * k3v
        k4v = a1 * (u + h * k3u)
        u = u + h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if k < steps - 1 and u <= 0.0:
            crossed = True
            if early_exit and not keep:
                return u, True, None
        if keep:
            path.append(u)
    return u, crossed, path


def _too_big(lam, m0, mh, steps):
    u1, crossed, _ = _rk4_linear(lam, m0, mh, steps)
    return crossed or u1 < 0.0


def first_eigen_shoot(m, tol: float = 1e-10, bracket=(0.1, 100.0), steps: int = 4096,
                      max_expand: int = 60) -> EigenResult:
    if steps < 2048:
        raise ValueError("shooting needs at least 2048 RK4 steps")
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")
    t, m0, mh = _sample_weight(m, steps)

    expand = 0
    while _too_big(lo, m0, mh, steps):
        lo *= 0.5
        expand += 1
        if expand > max_expand:
            raise EigenError("bracket expansion exhausted below")
    expand = 0
    while not _too_big(hi, m0, mh, steps):
        lo = hi
        hi *= 2.0
        expand += 1
        if expand > max_expand:
            raise EigenError("bracket expansion exhausted above")

    # bisect until the upper end has its only zero crossing at or past the last
    # step, so u(1; λ) changes sign exactly once across [lo, hi]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _too_big(mid, m0, mh, steps):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-3 * hi:
            break

    def endpoint(lam):
        return _rk4_linear(lam, m0, mh, steps, early_exit=False)[0]

    f_lo, f_hi = endpoint(lo), endpoint(hi)
    while f_hi > 0 or f_lo < 0:
        # hi still has an interior crossing but positive u(1): keep bisecting
        mid = 0.5 * (lo + hi)
        if _too_big(mid, m0, mh, steps):
            hi, f_hi = mid, endpoint(mid)
        else:
            lo, f_lo = mid, endpoint(mid)
        if hi - lo <= 1e-15 * hi:
            break
    if f_lo == 0:
        lam1 = lo
    elif f_hi == 0 or f_lo * f_hi > 0:
        lam1 = hi if abs(f_hi) < abs(f_lo) else lo
    else:
        lam1 = brentq(endpoint, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)

    u_end, _, path = _rk4_linear(lam1, m0, mh, steps, keep=True)
    vals = np.asarray(path)
    norm = float(np.max(np.abs(vals)))
    if norm == 0 or abs(u_end) > tol * norm:
        raise EigenError(f"eigen shooting did not converge: |u(1)| = {abs(u_end):.3e}, "
                         f"||u|| = {norm:.3e}")
    vals = vals / norm
    vals[0] = 0.0
    vals[-1] = 0.0
    phi = GridFunction(vals)
    res = _residual(vals, lam1, np.asarray(m0))
    return EigenResult(lam1, phi, "pruefer", res, steps + 1,
                       {"endpoint": u_end / norm, "bracket": (lo, hi)})


def _residual(vals, lam, m_nodes):
    """Sup norm of phi'' + lam m phi by centred second differences."""
    n = len(vals)
    h = 1.0 / (n - 1)
    d2 = (vals[:-2] - 2.0 * vals[1:-1] + vals[2:]) / (h * h)
    return float(np.max(np.abs(d2 + lam * m_nodes[1:-1] * vals[1:-1])))


def _fd_smallest(m, n, max_sweeps, tol):
    h = 1.0 / (n + 1)
    t = np.arange(1, n + 1) * h
    w = np.broadcast_to(np.asarray(m(t), dtype=float), t.shape).copy()
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise EigenError("weight m(t) must be finite and non-negative")
    if not np.any(w > 0):
        raise EigenError("weight m(t) vanishes at every interior node; no eigenvalue")
    ab = np.empty((3, n))
    ab[0, :] = -1.0 / h**2
    ab[1, :] = 2.0 / h**2
    ab[2, :] = -1.0 / h**2

    y = np.sin(np.pi * t)
    lam = math.inf
    for sweep in range(1, max_sweeps + 1):
        wy = w * y
        z = solve_banded((1, 1), ab, wy)
        # Rayleigh quotient of L^{-1} W in the W inner product; all terms positive
        lam_new = float(y @ wy) / float(z @ wy)
        y = z / np.max(np.abs(z))
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    else:
        raise EigenError(f"inverse power iteration did not converge in {max_sweeps} sweeps")
    return lam, t, y, w, sweep


def first_eigen_fd(m, n: int = 1024, max_sweeps: int = 10_000, tol: float = 1e-13) -> EigenResult:
    """Finite-difference eigenvalue with Richardson extrapolation over n and 2n.

    ``lambda1`` is the extrapolated value; the raw n-node value is in
    ``details['lambda_n']``.
    """
    if n < 16:
        raise ValueError("n must be >= 16")
    lam_n, t, y, w, sweeps = _fd_smallest(m, n, max_sweeps, tol)
    lam_2n, *_ = _fd_smallest(m, 2 * n, max_sweeps, tol)
    h1, h2 = 1.0 / (n + 1), 1.0 / (2 * n + 1)
    lam_x = (h1**2 * lam_2n - h2**2 * lam_n) / (h1**2 - h2**2)
    vals = np.concatenate(([0.0], np.abs(y), [0.0]))
    vals /= vals.max()
    m_nodes = np.concatenate(([0.0], w, [0.0]))
    res = _residual(vals, lam_n, m_nodes)
    return EigenResult(lam_x, GridFunction(vals), "fd_matrix", res, n + 2,
                       {"lambda_n": lam_n, "lambda_2n": lam_2n, "sweeps": sweeps})
