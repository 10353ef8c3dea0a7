"""Radial reduction of -Δv = λ h(|x|, v) on an annulus to u'' + λ q(t) f(t, u) = 0 on (0, 1).

N = 2 uses r = r2 (r1/r2)^t, which runs from r2 at t = 0 down to r1 at t = 1, and
q(t) = [r(t) log(r2/r1)]^2.

N >= 3 uses t = B - A r^{-(N-2)} (so t(r1) = 0, t(r2) = 1) with

    A = (r1 r2)^{N-2} / (r2^{N-2} - r1^{N-2}),   B = r2^{N-2} / (r2^{N-2} - r1^{N-2}),
    q(t) = (N-2)^{-2} A^{2/(N-2)} / (B - t)^{2(N-1)/(N-2)},
    r(t) = (A / (B - t))^{1/(N-2)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exprlang import Expr, ExprDomainError, parse

__all__ = [
    "AnnularProblem", "ReducedBVP", "ReductionError",
    "reduce", "map_t_to_r", "map_r_to_t",
]


class ReductionError(ValueError):
    pass


def _rpow(r: float, k: int) -> float:
    """r**k for integer k >= 0; exp/log for large k to dodge overflow in the product."""
    if k > 18:
        return math.exp(k * math.log(r))
    out = 1.0
    for _ in range(k):
        out *= r
    return out


@dataclass(frozen=True)
class AnnularProblem:
    N: int
    r1: float
    r2: float
    h: Expr

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ReductionError(f"dimension N must be an integer >= 2, got {self.N}")
        if not (0 < self.r1 < self.r2) or not math.isfinite(self.r2):
            raise ReductionError(f"radii must satisfy 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        extra = self.h.variables - {"r", "u"}
        if extra:
            raise ReductionError(f"h may only use r and u, found {sorted(extra)}")

    @classmethod
    def from_source(cls, N: int, r1: float, r2: float, h: str) -> "AnnularProblem":
        return cls(int(N), float(r1), float(r2), parse(h, {"r", "u"}))

    def constants(self) -> tuple[float, float]:
        """(A, B) of the N >= 3 change of variables."""
        if self.N == 2:
            raise ReductionError("A and B are only defined for N >= 3")
        k = self.N - 2
        p1, p2 = _rpow(self.r1, k), _rpow(self.r2, k)
        if not (math.isfinite(p1) and math.isfinite(p2)) or p2 == p1:
            raise ReductionError(f"r^{k} overflows or degenerates for r1={self.r1}, r2={self.r2}")
        denom = p2 - p1
        A = (p1 / denom) * p2
        B = p2 / denom
        if not (math.isfinite(A) and math.isfinite(B)):
            raise ReductionError("overflow computing A, B")
        return A, B


def _log_constants(p: AnnularProblem) -> tuple[float, float]:
    """(log A, log(B - 1)) computed without forming r^(N-2).

    With rho = (r1/r2)^(N-2): A = r1^(N-2) / (1 - rho), B - 1 = rho / (1 - rho).
    Writing B - t = (1 - t) + (B - 1) avoids the cancellation in B - t near
    t = 1 once B rounds to 1 (large N or wide annuli).
    """
    k = p.N - 2
    log_rho = k * math.log(p.r1 / p.r2)
    log_one_minus = math.log(-math.expm1(log_rho))
    return k * math.log(p.r1) - log_one_minus, log_rho - log_one_minus


def _log_B_minus_t(t, log_c):
    one_minus = 1.0 - np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return np.logaddexp(np.log(one_minus), log_c)


def map_t_to_r(t, p: AnnularProblem):
    """Radius corresponding to t; vectorised. Endpoints map exactly."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~((t_arr >= 0) & (t_arr <= 1))):
        raise ReductionError("t must lie in [0, 1]")
    if p.N == 2:
        r = p.r2 * np.power(p.r1 / p.r2, t_arr)
        r = np.where(t_arr == 0, p.r2, np.where(t_arr == 1, p.r1, r))
    else:
        log_a, log_c = _log_constants(p)
        r = np.exp((log_a - _log_B_minus_t(t_arr, log_c)) / (p.N - 2))
        r = np.where(t_arr == 0, p.r1, np.where(t_arr == 1, p.r2, r))
    return float(r) if r.ndim == 0 else r


def map_r_to_t(r, p: AnnularProblem):
    """Inverse of :func:`map_t_to_r`."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(~((r_arr >= p.r1) & (r_arr <= p.r2))):
        raise ReductionError("r must lie in [r1, r2]")
    if p.N == 2:
        t = np.log(p.r2 / r_arr) / math.log(p.r2 / p.r1)
        t = np.where(r_arr == p.r2, 0.0, np.where(r_arr == p.r1, 1.0, t))
    else:
        k = p.N - 2
        # t = B - A r^-k = (1 - (r1/r)^k) / (1 - (r1/r2)^k)
        num = -np.expm1(k * np.log(p.r1 / r_arr))
        t = num / -math.expm1(k * math.log(p.r1 / p.r2))
        t = np.where(r_arr == p.r1, 0.0, np.where(r_arr == p.r2, 1.0, t))
    return float(t) if t.ndim == 0 else t


@dataclass(frozen=True, eq=False)
class ReducedBVP:
    """u'' + λ q(t) f(t, u) = 0, u(0) = u(1) = 0.

    ``q`` and ``f`` are vectorised callables. ``f_scalar`` is an optional fast
    scalar version of ``f`` (used by the shooting integrators).
    """

    q: Callable
    f: Callable
    provenance: str = "direct"
    A: Optional[float] = None
    B: Optional[float] = None
    q_source: str = ""
    f_source: str = ""
    f_scalar: Optional[Callable] = field(default=None, repr=False)
    problem: Optional[AnnularProblem] = field(default=None, repr=False)

    def __post_init__(self):
        if self.f_scalar is None:
            object.__setattr__(self, "f_scalar", lambda t, u: float(self.f(np.float64(t), np.float64(u))))
        ts = np.linspace(0.0, 1.0, 1001)
        qs = np.asarray(self.q(ts), dtype=float)
        qs = np.broadcast_to(qs, ts.shape)
        if not np.all(np.isfinite(qs)):
            raise ReductionError("q(t) is not finite on [0, 1]")
        if not np.all(qs > 0):
            i = int(np.argmin(qs))
            raise ReductionError(f"q(t) must be positive on [0, 1]; q({ts[i]}) = {qs[i]}")
        for t in ts[::100]:
            try:
                f0 = self.f_scalar(float(t), 0.0)
            except (ExprDomainError, ZeroDivisionError, ValueError):
                continue
            if f0 < 0:
                raise ReductionError(f"f(t, 0) must be >= 0; f({t}, 0) = {f0}")

    @classmethod
    def from_expressions(cls, f: str | Expr, q: str | Expr = "1") -> "ReducedBVP":
        fe = f if isinstance(f, Expr) else parse(f, {"t", "u"})
        qe = q if isinstance(q, Expr) else parse(q, {"t"})
        if fe.variables - {"t", "u"}:
            raise ReductionError("f may only use t and u")
        if qe.variables - {"t"}:
            raise ReductionError("q may only use t")
        return cls(
            q=lambda t: qe.vectorized(t=t),
            f=lambda t, u: fe.vectorized(t=t, u=u),
            q_source=qe.source,
            f_source=fe.source,
            f_scalar=lambda t, u: fe._scalar({"t": t, "u": u}),
        )

    def m_weight(self, b: Callable) -> Callable:
        """The eigen-problem weight q(t) b(t)."""
        return lambda t: np.asarray(self.q(t), dtype=float) * np.asarray(b(t), dtype=float)


def reduce(p: AnnularProblem) -> ReducedBVP:
    h = p.h
    if p.N == 2:
        L = math.log(p.r2 / p.r1)

        def q(t):
            return (map_t_to_r(np.asarray(t, dtype=float), p) * L) ** 2

        def r_scalar(t):
            if t == 0:
                return p.r2
            if t == 1:
                return p.r1
            return p.r2 * (p.r1 / p.r2) ** t

        A = B = None
    else:
        try:
            A, B = p.constants()
        except ReductionError:
            A = B = None  # not representable; the log form below still is
        k = p.N - 2
        log_a, log_c = _log_constants(p)
        log_scale = 2.0 * log_a / k - 2.0 * math.log(k)
        expo = 2.0 * (p.N - 1) / k

        def q(t):
            return np.exp(log_scale - expo * _log_B_minus_t(t, log_c))

        def r_scalar(t):
            if t == 0:
                return p.r1
            if t == 1:
                return p.r2
            return math.exp((log_a - float(_log_B_minus_t(t, log_c))) / k)

    def f(t, u):
        return h.vectorized(r=map_t_to_r(np.asarray(t, dtype=float), p), u=u)

    def f_scalar(t, u):
        return h._scalar({"r": r_scalar(t), "u": u})

    tag = f"annulus(N={p.N}, r1={p.r1!r}, r2={p.r2!r})"
    return ReducedBVP(q=q, f=f, provenance=tag, A=A, B=B,
                      q_source="", f_source=f"h(r(t), u) with h = {h.source}",
                      f_scalar=f_scalar, problem=p)
