r"""
Solving and verifying
=====================

Picard iteration on the integral form and shooting on the ODE, checked
against each other and against the a-posteriori verifier.
"""

from annulus_bvp import (ReducedBVP, certify_T13, check_conclusion, picard_solve, shoot_solve,
                         verify_solution)

bvp = ReducedBVP.from_expressions("u/(1+u)")
for lam in (20.0, 50.0, 100.0, 200.0):
    p = picard_solve(bvp, lam)
    s = shoot_solve(bvp, lam)
    print(f"λ={lam:5g}  picard {p.sup_norm:.12f} ({p.iterations} it)  "
          f"shoot {[round(r.sup_norm, 12) for r in s]}")

rep = picard_solve(bvp, 100.0)
print(verify_solution(rep.u, 100.0, bvp).summary())

rng = certify_T13(0.0108, 1.0, bvp)
res = check_conclusion(picard_solve(bvp, 35.0), rng)
print(rng.describe())
print(res.detail, "->", "pass" if res.passed else "fail")

# below the first eigenvalue the iterates collapse onto u = 0
print(picard_solve(bvp, 5.0).message)
