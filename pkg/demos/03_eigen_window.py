r"""
Eigenvalue windows
==================

The window (λ1/c, λ1) uses the first eigenvalue of -u'' = λ q b u. Both
internal routes (shooting and finite differences) are compared. On the
N = 3, r1 = 1, r2 = 2 annulus weight 4/(2-t)^4 the eigenvalue is exactly π²,
because the radial Laplacian of the annulus has λ1 = π²/(r2 - r1)^2.
"""

import math

import numpy as np

from annulus_bvp import ReducedBVP, certify_T41, certify_T42, first_eigen_fd, first_eigen_shoot

w = lambda t: 4.0 / (2.0 - np.asarray(t)) ** 4
s, f = first_eigen_shoot(w), first_eigen_fd(w)
print("shooting", s.lambda1, " fd", f.lambda1, " π²", math.pi ** 2)
print("eigenfunction peak at t =", s.phi.t[np.argmax(s.phi.values)])

rng, hyps = certify_T41("1", 2.0, 0.8, 1.6, ReducedBVP.from_expressions("u^3"))
print(rng.describe())
for h in hyps:
    print("  ", h)

rng, hyps = certify_T42("1", 4.0, 0.5, 2.0, ReducedBVP.from_expressions("u^(-1)"))
print(rng.describe())
for h in hyps:
    print("  ", h)

# a linear f cannot satisfy the superlinear hypothesis; the sampler says where
rng, hyps = certify_T41("1", 2.0, 0.5, 1.0, ReducedBVP.from_expressions("u"))
print(hyps[1])
