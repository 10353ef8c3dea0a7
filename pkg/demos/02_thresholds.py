r"""
λ thresholds from ratio bounds
==============================

For q ≡ 1 the four thresholds reduce to closed forms. The worked examples
use m = 1 for f = u^2/(1+u) and f = u/(1+u); the sampled minimum of f(t,u)/u
is shown next to it.
"""

import math

from annulus_bvp import (ReducedBVP, certify_T11, certify_T12, certify_T13, certify_T14,
                         check_limit_condition, min_ratio)

sup = ReducedBVP.from_expressions("u^2/(1+u)")
rng = certify_T11(1.0, 1.0, sup)
print(rng.describe())
print("  1536/11 =", 1536 / 11)
print("  sampled m on [1/4,3/4] x [1e-8, 1]:", min_ratio(sup.f, U=1.0).value)
for h in rng.hypotheses:
    print("  ", h)

sub = ReducedBVP.from_expressions("u/(1+u)")
print(certify_T13(0.0108, 1.0, sub).describe(), " 384/11 =", 384 / 11)

sq = ReducedBVP.from_expressions("sqrt(u)+u/2")
for R in (1, 4, 100, 1e6):
    up = certify_T12(R, 1 / math.sqrt(R) + 0.5, sq).upper
    print(f"R={R:g}: λ < {up:.10f}   12√R/(2+√R) = {12 * math.sqrt(R) / (2 + math.sqrt(R)):.10f}")
print(check_limit_condition("(7)", sq.f))

cub = ReducedBVP.from_expressions("u^3+u/2")
for r in (1.0, 0.1, 1e-4):
    rng = certify_T14(r, None, cub)  # M computed by sampling: r^2 + 1/2
    print(f"r={r:g}: λ < {rng.upper:.10f}  12/(2r²+1) = {12 / (2 * r * r + 1):.10f}")
