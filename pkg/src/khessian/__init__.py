"""Radial k-Hessian equations with weights, studied through a Lotka-Volterra transform.

Modules: :mod:`weights` (weights and their hypotheses), :mod:`exponents`
(critical exponents and stationary points), :mod:`transform`,
:mod:`solver` (regular, singular and maximal solutions), :mod:`classify`
(omega-limits and decay), :mod:`bifurcation` (multiplicity) and
:mod:`cli`.
"""

from .errors import (AssumptionError, ChartError, ConstructionError, DomainError,
                     EstimationError, KHessianError, NumericError)
from .exponents import ProblemParams, q_jl, q_star, stationary_points
from .profiles import Orbit, RadialSolution
from .solver import (CLASSIFY, DEFAULT, IntegratorConfig, estimate_lambda_star,
                     maximal_solution_iterate, p2_orbit, regular_orbit, singular_solution,
                     solve_ivp, solve_orbit)
from .transform import LVField, forward, hessian_residual, inverse
from .weights import WeightSpec, check_assumptions
from .classify import Classification, classify_orbit, slope_checks
from .bifurcation import BifurcationCurve, count_solutions, intersection_count, lambda_of_a, sweep

__version__ = "0.1.0"
