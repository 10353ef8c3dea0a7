"""Composite Gauss-Legendre quadrature on subintervals of [0, 1].

Integrands are vectorised callables ``g(s_array) -> array``. The kink of the
Green's function at s = t is always handled by splitting the interval there.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernel import green_diag

__all__ = [
    "QuadratureRule", "DEFAULT_RULE", "QuadratureError",
    "gauss_nodes", "integrate", "kernel_weight_integral", "apply_kernel_row",
]


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    panel_count: int = 64
    points_per_panel: int = 5

    def __post_init__(self):
        if int(self.panel_count) < 1:
            raise ValueError("panel_count must be >= 1")
        if not 1 <= int(self.points_per_panel) <= 10:
            raise ValueError("points_per_panel must be in 1..10")


DEFAULT_RULE = QuadratureRule()


@lru_cache(maxsize=None)
def _leggauss(p: int):
    x, w = np.polynomial.legendre.leggauss(p)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_nodes(a: float, b: float, rule: QuadratureRule = DEFAULT_RULE):
    """Nodes and weights of the composite rule on [a, b], flattened."""
    x, w = _leggauss(rule.points_per_panel)
    edges = np.linspace(a, b, rule.panel_count + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _sample(g, nodes):
    vals = np.asarray(g(nodes), dtype=float)
    if vals.shape != nodes.shape:
        vals = np.broadcast_to(vals, nodes.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise QuadratureError(f"non-finite integrand value {vals[i]} at node s={nodes[i]!r}")
    return vals


def integrate(g, a: float, b: float, rule: QuadratureRule = DEFAULT_RULE) -> float:
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    if a == b:
        return 0.0
    nodes, weights = gauss_nodes(a, b, rule)
    return float(np.dot(weights, _sample(g, nodes)))


def kernel_weight_integral(q, a: float = 0.0, b: float = 1.0,
                           rule: QuadratureRule = DEFAULT_RULE) -> float:
    """The weight integral of s(1-s) q(s) over [a, b] within [0, 1]."""
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError("[a, b] must be a subinterval of [0, 1]")
    return integrate(lambda s: green_diag(s) * np.asarray(q(s), dtype=float), a, b, rule)


def apply_kernel_row(t: float, integrand, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Integral of G(t, s) * integrand(s) over s in [0, 1], split at s = t."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    left = integrate(lambda s: s * np.asarray(integrand(s), dtype=float), 0.0, t, rule)
    right = integrate(lambda s: (1.0 - s) * np.asarray(integrand(s), dtype=float), t, 1.0, rule)
    return (1.0 - t) * left + t * right
