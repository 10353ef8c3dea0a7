r"""
Sweeping λ
==========

Number of positive solutions and their norms along a λ grid. For the
superlinear f = u^3 + u/2 (f/u -> 1/2 at 0) one branch leaves u = 0 at
λ = 2π² and its norm grows without bound as λ -> 0.
"""

import numpy as np

from annulus_bvp import ReducedBVP, sweep

bvp = ReducedBVP.from_expressions("u^3+u/2")
lams = np.geomspace(0.5, 30, 8)
for row in sweep(bvp, lams):
    norms = ", ".join(f"{v:.6g}" for v in sorted(row.sup_norms))
    print(f"λ={row.lam:8.4f}  n={row.n_solutions}  sup norms [{norms}]")

sub = ReducedBVP.from_expressions("u/(1+u)")
for row in sweep(sub, [5, 10, 35, 100, 200], method="picard"):
    print(f"λ={row.lam:6g}  n={row.n_solutions}  {row.sup_norms}")
