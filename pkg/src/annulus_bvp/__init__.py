"""Positive solutions of u'' + λ q(t) f(t, u) = 0, u(0) = u(1) = 0.

The equation arises as the radial reduction of -Δv = λ h(|x|, v) on an
annulus. The package provides the reduction, the Green's-function operator,
λ-range certificates, first eigenvalues, Picard and shooting solvers and
a-posteriori verification.
"""

from .certify import (CertificationError, HypothesisReport, LambdaRange, UnboundedThreshold,
                      certify_T11, certify_T12, certify_T13, certify_T14, certify_T41,
                      certify_T42, check_limit_condition)
from .eigen import EigenError, EigenResult, first_eigen_fd, first_eigen_shoot
from .exprlang import Expr, ExprDomainError, ExprError, ExprSyntaxError, evaluate, parse
from .kernel import green, green_diag
from .problem import ProblemError, ProblemFile, load_problem, packaged_problem, parse_problem
from .quadrature import QuadratureRule, integrate, kernel_weight_integral
from .ratio_bounds import RatioStats, max_ratio, min_ratio
from .reduction import AnnularProblem, ReducedBVP, ReductionError, map_r_to_t, map_t_to_r, reduce
from .solver import (GridFunction, SolveReport, SolverConfig, SolverError, apply_T,
                     picard_solve, scan_endpoint, shoot_solve, sweep)
from .verify import Tolerances, VerificationReport, check_conclusion, verify_solution

__version__ = "0.1.0"
