"""Independent verification of solution records.

Two oracles re-derive every claimed solution from scratch, consuming only
the record fields (never solver internals):

  * `ode_residual` re-integrates u'' + lam h exp(u) = 0 end-to-end with a
    fixed-step RK4 (step 1e-4, deterministic) started from the record's own
    boundary data, and reports the sup discrepancy against the closed form.
  * `green_residual` checks the fixed-point identity
    u(x) = int G(x,y) lam h(y) exp(u(y)) dy with the Dirichlet Green's
    function of -d^2/dx^2 on [-1,1], by per-segment Gauss-Legendre
    quadrature escalated until two successive orders agree.

Symmetry classification, positivity, and the small-amplitude uniqueness
audit round out the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import rk4_ode_segment
from .core import ProblemParams
from .noneven import PiecewiseSolution, is_positive, symmetry_defect

__all__ = [
    "VerificationReport",
    "QuadratureError",
    "ode_residual",
    "green_residual",
    "green_defect",
    "boundary_error",
    "classify_symmetry",
    "check_small_amplitude_uniqueness",
    "verify_solution",
]

DEFAULT_ODE_TOL = 1e-7
DEFAULT_GREEN_TOL = 1e-7
DEFAULT_SYMMETRY_TOL = 1e-9

_GL_ORDERS = (16, 24, 32, 48, 64, 96, 128)


class QuadratureError(RuntimeError):
    """Gauss-Legendre escalation failed to stabilize."""


@dataclass(frozen=True)
class VerificationReport:
    """Residual summary for one solution record."""

    ode_residual_sup: float
    green_residual_sup: float
    boundary_error: float
    symmetry_defect: float
    positivity_ok: bool
    ode_tol: float = DEFAULT_ODE_TOL
    green_tol: float = DEFAULT_GREEN_TOL

    @property
    def verified(self) -> bool:
        return (
            self.ode_residual_sup < self.ode_tol
            and self.green_residual_sup < self.green_tol
            and self.positivity_ok
        )


def ode_residual(sol: PiecewiseSolution, step=1e-4) -> float:
    """Sup discrepancy between an independent RK4 pass and the closed form.

    Integrates from x = -1 with the record's own value and slope there,
    marching the three segments with the step weight switched per segment.
    """
    a = sol.params.alpha
    u = float(sol.u(-1.0))
    v = float(sol.u_prime(-1.0))
    segments = (
        (-1.0, -a, 1.0, 0, sol.amp_left, sol.d_left, sol.m_left),
        (-a, a, 0.0, 1, sol.A, sol.B, 0.0),
        (a, 1.0, 1.0, 0, sol.amp_right, sol.d_right, sol.m_right),
    )
    worst = 0.0
    for x0, x1, weight, kind, p1, p2, p3 in segments:
        nsteps = max(2, int(round((x1 - x0) / step)))
        u, v, disc = rk4_ode_segment(x0, x1, u, v, sol.lam, weight, nsteps, kind, p1, p2, p3)
        if disc > worst:
            worst = disc
    return worst


@lru_cache(maxsize=None)
def _gauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _integrate_stable(f, lo: float, hi: float, agree_tol: float):
    """Gauss-Legendre on [lo, hi], order escalated until two orders agree."""
    if hi <= lo:
        return 0.0
    prev = None
    for order in _GL_ORDERS:
        nodes, weights = _gauss(order)
        y = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        val = 0.5 * (hi - lo) * float(np.dot(weights, f(y)))
        if prev is not None and abs(val - prev) <= agree_tol * max(1.0, abs(val)):
            return val
        prev = val
    raise QuadratureError(f"no stabilization on [{lo}, {hi}] up to order {_GL_ORDERS[-1]}")


def green_defect(u_of, lam: float, params: ProblemParams, x_grid=None, agree_tol=1e-12) -> float:
    """Sup over x of |u(x) - int G(x,y) lam h(y) exp(u(y)) dy| for a callable u.

    The y-integral runs over the outer intervals only (the weight kills the
    middle) and is split additionally at y = x, where the Green's function
    has its kink.
    """
    a = params.alpha
    if x_grid is None:
        x_grid = np.union1d(np.linspace(-1.0, 1.0, 81), [-a, a])

    def f(y):
        return lam * np.exp(u_of(y))

    worst = 0.0
    for x in np.asarray(x_grid, dtype=float):
        total = 0.0
        for lo, hi in ((-1.0, -a), (a, 1.0)):
            pieces = ((lo, hi),) if not (lo < x < hi) else ((lo, x), (x, hi))
            for plo, phi in pieces:
                def integrand(y, x=x):
                    return 0.5 * (1.0 + np.minimum(x, y)) * (1.0 - np.maximum(x, y)) * f(y)

                total += _integrate_stable(integrand, plo, phi, agree_tol)
        d = abs(float(u_of(x)) - total)
        if d > worst:
            worst = d
    return worst


def green_residual(sol: PiecewiseSolution, x_grid=None, agree_tol=1e-12) -> float:
    """Fixed-point defect of a solution record under the Green's integral."""
    return green_defect(sol.u, sol.lam, sol.params, x_grid=x_grid, agree_tol=agree_tol)


def boundary_error(sol: PiecewiseSolution) -> float:
    return float(max(abs(sol.u(-1.0)), abs(sol.u(1.0))))


def classify_symmetry(sol: PiecewiseSolution, tol=DEFAULT_SYMMETRY_TOL) -> str:
    """"even" when the reflection defect stays inside tol, else "non-even"."""
    return "even" if symmetry_defect(sol) <= tol else "non-even"


def _solution_distance(s1: PiecewiseSolution, s2: PiecewiseSolution, n=33) -> float:
    x = np.linspace(-1.0, 1.0, n)
    du = float(np.max(np.abs(s1.u(x) - s2.u(x))))
    return max(du, abs(s1.lam - s2.lam))


def check_small_amplitude_uniqueness(lam, params: ProblemParams, solutions, tol=1e-8) -> bool:
    """Audit: at most one genuinely distinct solution with sup-norm <= 1.

    Records that coincide within `tol` (same function, duplicated entry)
    count once; the audit fails only on two small-amplitude solutions that
    are numerically distinct beyond tolerance.
    """
    small = [s for s in solutions if float(np.max(np.abs(s.u(np.linspace(-1, 1, 257))))) <= 1.0 + 1e-12]
    distinct = []
    for s in small:
        if all(_solution_distance(s, other) > tol for other in distinct):
            distinct.append(s)
    return len(distinct) <= 1


def verify_solution(
    sol: PiecewiseSolution,
    ode_tol=DEFAULT_ODE_TOL,
    green_tol=DEFAULT_GREEN_TOL,
) -> VerificationReport:
    """Full independent report for one record."""
    return VerificationReport(
        ode_residual_sup=ode_residual(sol),
        green_residual_sup=green_residual(sol),
        boundary_error=boundary_error(sol),
        symmetry_defect=symmetry_defect(sol),
        positivity_ok=is_positive(sol),
        ode_tol=ode_tol,
        green_tol=green_tol,
    )
