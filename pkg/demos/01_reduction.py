r"""
Radial reduction
================

A radial solution v(|x|) of -Δv = λ h(|x|, v) on the annulus r1 < |x| < r2 in
R^N satisfies an ODE in r. The change of variable t(r) turns it into
u'' + λ q(t) f(t, u) = 0 on [0, 1] with u(0) = u(1) = 0.
"""

import numpy as np

from annulus_bvp import AnnularProblem, map_r_to_t, map_t_to_r, reduce

p = AnnularProblem.from_source(3, 1.0, 2.0, "u^2/(1+u)")
bvp = reduce(p)
A, B = p.constants()
print("A, B =", A, B)

t = np.linspace(0, 1, 5)
print("t     ", t)
print("r(t)  ", map_t_to_r(t, p))
print("q(t)  ", bvp.q(t))
print("4/(2-t)^4", 4 / (2 - t) ** 4)

# round trip
r = map_t_to_r(np.linspace(0, 1, 1001), p)
print("max round-trip error", np.max(np.abs(map_r_to_t(r, p) - np.linspace(0, 1, 1001))))

# N = 2 uses a logarithmic variable instead; with r2 = e, q(t) = e^{2(1-t)}
p2 = AnnularProblem.from_source(2, 1.0, np.e, "u")
print("N=2 q(0), q(1):", reduce(p2).q(0.0), reduce(p2).q(1.0))
