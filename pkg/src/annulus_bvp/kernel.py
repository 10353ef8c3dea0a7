"""Dirichlet Green's function of -u'' on (0, 1).

    G(t, s) = s (1 - t)   for 0 <= s <= t <= 1
              t (1 - s)   for 0 <= t <= s <= 1

with the bounds  G(t, s) <= G(s, s) = s(1 - s)  everywhere and
G(t, s) >= G(s, s)/4  for t in [1/4, 3/4].
"""

import numpy as np

__all__ = ["green", "green_diag", "KernelDomainError"]


class KernelDomainError(ValueError):
    pass


def _check_unit(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise KernelDomainError(f"{name} must lie in [0, 1]")
    return x


def green(t, s):
    """Evaluate G(t, s); accepts scalars or broadcastable arrays."""
    t = _check_unit("t", t)
    s = _check_unit("s", s)
    out = np.where(s <= t, s * (1.0 - t), t * (1.0 - s))
    return float(out) if out.ndim == 0 else out


def green_diag(s):
    s = _check_unit("s", s)
    out = s * (1.0 - s)
    return float(out) if out.ndim == 0 else out
