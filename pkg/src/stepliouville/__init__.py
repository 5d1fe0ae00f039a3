"""Solver and verification toolkit for the step-weight Liouville problem.

Subpackages:
  core      closed-form profiles, amplitude map, linearized solutions
  roots     special amplitudes (fold, symmetry breaking) and load inversion
  spectrum  linearized eigenvalues, Morse index, shooting and matrix methods
  noneven   piecewise solutions, matching system, arclength continuation
  verify    independent residual checks (re-integration, Green fixed point)
  cli       command-line frontend
"""

from .core import (
    EvenSolution,
    ProblemParams,
    c1,
    d_lambda,
    eta,
    eta_prime,
    g_fn,
    lambda_of_beta,
    linearized_potential,
    psi,
    u_even,
    u_even_prime,
    varphi,
    w_prime,
    w_profile,
    w_second,
)
from .roots import SpecialPoints, bracketed_root, invert_lambda, solve_beta1, solve_beta2, special_points

__version__ = "0.1.0"
