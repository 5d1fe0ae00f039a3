"""Closed-form building blocks for the step-weight Liouville problem.

The boundary value problem is

    u'' + lam * h(x, alpha) * exp(u) = 0  on (-1, 1),   u(-1) = u(1) = 0,

with the step weight h = 0 on the middle interval |x| < alpha and h = 1 on
the two outer intervals alpha <= |x| <= 1.  Every positive even solution is
known in closed form: a flat plateau of height beta over the middle interval,
glued to scaled copies of the sech^2 profile

    w(x) = log(1 - tanh^2(x / sqrt(2)))  =  -2 * log cosh(x / sqrt(2)),

which is the solution of w'' + exp(w) = 0 with w(0) = w'(0) = 0.  The
amplitude beta determines the load parameter through

    lam = Lambda(beta) = (1 - alpha)^-2 * exp(-beta) * eta(beta)^2,

where eta is the inverse of beta = -w(x) on [0, inf).  This module evaluates
w, eta, Lambda, the even solution U(.; beta), the two explicit solutions
psi (even) and varphi (odd) of the linearized equation, the scalar function
g used to locate the root of varphi(1; .), and the linearized potential.

All functions are pure, accept numpy arrays in the spatial argument, and are
numerically stable for large amplitudes (log-cosh and arctanh are evaluated
through cancellation-free rewrites).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)
_LOG2 = math.log(2.0)

__all__ = [
    "ProblemParams",
    "EvenSolution",
    "w_profile",
    "w_prime",
    "w_second",
    "eta",
    "eta_prime",
    "lambda_of_beta",
    "d_lambda",
    "u_even",
    "u_even_prime",
    "psi",
    "psi_xx",
    "c1",
    "varphi",
    "varphi_xx",
    "g_fn",
    "linearized_potential",
]


@dataclass(frozen=True)
class ProblemParams:
    """Weight parameter alpha and the induced three-interval geometry.

    The weight vanishes on (-alpha, alpha) and equals one on the outer
    intervals [-1, -alpha] and [alpha, 1].
    """

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def outer_width(self) -> float:
        return 1.0 - self.alpha

    def weight(self, x):
        """Step weight h(x, alpha); 0 inside |x| < alpha, 1 on [alpha, 1]."""
        return np.where(np.abs(x) < self.alpha, 0.0, 1.0)


def _log_cosh(y):
    """log(cosh(y)) without overflow: |y| + log1p(exp(-2|y|)) - log 2."""
    a = np.abs(y)
    return a + np.log1p(np.exp(-2.0 * a)) - _LOG2


def w_profile(x):
    """Profile w(x) = log(1 - tanh^2(x/sqrt2)) = -2 log cosh(x/sqrt2).

    Even, w(0) = 0, strictly decreasing for x > 0, and w'' = -exp(w)
    everywhere.  Evaluated through the overflow-free log-cosh form for
    arbitrary arguments, with a short series near 0 where the log-cosh
    rewrite would lose relative accuracy.
    """
    y = np.asarray(x, dtype=float) / SQRT2
    small = np.abs(y) < 3e-3
    ysafe = np.where(small, 1.0, y)
    series = -y * y + y**4 / 6.0 - 2.0 * y**6 / 45.0
    return np.where(small, series, -2.0 * _log_cosh(ysafe))


def w_prime(x):
    """First derivative w'(x) = -sqrt(2) tanh(x/sqrt2)."""
    return -SQRT2 * np.tanh(np.asarray(x, dtype=float) / SQRT2)


def w_second(x):
    """Second derivative w''(x) = -exp(w(x)) = -sech^2(x/sqrt2)."""
    return -np.exp(w_profile(x))


def eta(beta):
    """Inverse of the amplitude map beta = -w(x) on [0, inf).

    eta(beta) = sqrt(2) * arctanh(sqrt(1 - exp(-beta))), evaluated through
    the exact rewrite

        eta(beta) = sqrt(2) * (beta/2 + log(1 + sqrt(1 - exp(-beta))))

    which stays accurate when 1 - exp(-beta) is within one ulp of 1
    (beta ~ 36 and beyond).  eta(0) = 0 by continuous extension.
    """
    b = np.asarray(beta, dtype=float)
    if np.any(b < 0.0):
        raise ValueError(f"eta requires beta >= 0, got {beta}")
    s = np.sqrt(-np.expm1(-b))
    return SQRT2 * (0.5 * b + np.log1p(s))


def eta_prime(beta):
    """Derivative eta'(beta) = 1 / (sqrt(2) sqrt(1 - exp(-beta))).

    Consistent with eta' = -1 / w'(eta); diverges as beta -> 0+.
    """
    b = np.asarray(beta, dtype=float)
    if np.any(b <= 0.0):
        raise ValueError(f"eta_prime requires beta > 0, got {beta}")
    s = np.sqrt(-np.expm1(-b))
    return 1.0 / (SQRT2 * s)


def lambda_of_beta(beta, params: ProblemParams):
    """Load parameter of the even solution with amplitude beta.

    Lambda(beta) = (1-alpha)^-2 * exp(-beta) * eta(beta)^2.  Unimodal:
    increasing up to the fold amplitude, decreasing after, with limits 0 at
    both ends.
    """
    b = np.asarray(beta, dtype=float)
    if np.any(b <= 0.0):
        raise ValueError(f"lambda_of_beta requires beta > 0, got {beta}")
    e = eta(b)
    return np.exp(-b) * e * e / params.outer_width**2


def d_lambda(beta, params: ProblemParams):
    """Derivative of Lambda; vanishes exactly where 2 eta' = eta."""
    b = np.asarray(beta, dtype=float)
    if np.any(b <= 0.0):
        raise ValueError(f"d_lambda requires beta > 0, got {beta}")
    e = eta(b)
    return np.exp(-b) * e * (2.0 * eta_prime(b) - e) / params.outer_width**2


def _check_x(x):
    xv = np.asarray(x, dtype=float)
    if np.any(np.abs(xv) > 1.0 + 1e-12):
        raise ValueError("spatial argument outside [-1, 1]")
    return xv


def _outer_arg(r, beta, params):
    """Scaled profile argument z = eta(beta) * (r - alpha)/(1 - alpha), r = |x|."""
    return eta(beta) * (np.maximum(r - params.alpha, 0.0)) / params.outer_width


def u_even(x, beta, params: ProblemParams):
    """Even solution: plateau beta inside, shifted sech^2 profile outside.

    C^1 on [-1, 1], equals beta for |x| <= alpha and 0 at x = +-1.
    """
    xv = _check_x(x)
    if beta <= 0.0:
        raise ValueError(f"u_even requires beta > 0, got {beta}")
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    return np.where(r < params.alpha, beta, w_profile(z) + beta)


def u_even_prime(x, beta, params: ProblemParams):
    """Spatial derivative of the even solution (continuous across +-alpha)."""
    xv = _check_x(x)
    if beta <= 0.0:
        raise ValueError(f"u_even_prime requires beta > 0, got {beta}")
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    scale = eta(beta) / params.outer_width
    return np.where(r < params.alpha, 0.0, np.sign(xv) * scale * w_prime(z))


@dataclass(frozen=True)
class EvenSolution:
    """Even solution record: amplitude beta with induced load lam = Lambda(beta)."""

    params: ProblemParams
    beta: float
    lam: float = field(init=False)

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "lam", float(lambda_of_beta(self.beta, self.params)))

    def u(self, x):
        return u_even(x, self.beta, self.params)

    def u_prime(self, x):
        return u_even_prime(x, self.beta, self.params)

    @property
    def sup_norm(self) -> float:
        return self.beta


def psi(x, beta, params: ProblemParams):
    """Even solution of the linearized equation psi'' + q psi = 0.

    Equals 2 on the middle interval; on the outer intervals it is
    z w'(z) + 2 in the scaled profile coordinate z.  Vanishes at x = +-1
    exactly at the fold amplitude and is negative there beyond it.
    """
    xv = _check_x(x)
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    return np.where(r < params.alpha, 2.0, z * w_prime(z) + 2.0)


def psi_xx(x, beta, params: ProblemParams):
    """Analytic second derivative of psi, per segment (0 on the middle one)."""
    xv = _check_x(x)
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    c = eta(beta) / params.outer_width
    outer = c * c * (2.0 * w_second(z) - z * np.exp(w_profile(z)) * w_prime(z))
    return np.where(r < params.alpha, 0.0, outer)


def c1(beta, params: ProblemParams) -> float:
    """Gluing constant of the odd linearized solution varphi.

    c1(beta) = -2 (1-alpha)^2 / eta(beta)^2 - alpha^2, chosen so that varphi
    is C^1 across +-alpha.
    """
    e = float(eta(beta))
    return -2.0 * params.outer_width**2 / (e * e) - params.alpha**2


def varphi(x, beta, params: ProblemParams):
    """Odd solution of the linearized equation; equals 2x on the middle interval.

    On [alpha, 1] it is (c1 + alpha x) U'(x) + 2 alpha and extends oddly to
    the left interval.  Its boundary value varphi(1; beta) changes sign once
    in beta, at the symmetry-breaking amplitude.
    """
    xv = _check_x(x)
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    uprime_right = (eta(beta) / params.outer_width) * w_prime(z)
    cc = c1(beta, params)
    outer = (cc + params.alpha * r) * uprime_right + 2.0 * params.alpha
    inner = 2.0 * r
    return np.sign(xv) * np.where(r < params.alpha, inner, outer)


def varphi_xx(x, beta, params: ProblemParams):
    """Analytic second derivative of varphi, per segment (0 on the middle one)."""
    xv = _check_x(x)
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    c = eta(beta) / params.outer_width
    expw = np.exp(w_profile(z))
    cc = c1(beta, params)
    # on [alpha,1]: 2a U'' + (c1 + a x) U''' with U'' = c^2 w'', U''' = -c^3 e^w w'
    outer = (
        2.0 * params.alpha * c * c * w_second(z)
        - (cc + params.alpha * r) * c**3 * expw * w_prime(z)
    )
    return np.sign(xv) * np.where(r < params.alpha, 0.0, outer)


def g_fn(x, params: ProblemParams):
    """Scalar transfer of the boundary value of varphi.

    g(x) = 2 (1 - alpha - alpha x^2) tanh(x)/x + 2 alpha for x > 0; strictly
    decreasing from limit 2 at 0+ to -inf, and varphi(1; beta) =
    g(eta(beta)/sqrt2).
    """
    xv = np.asarray(x, dtype=float)
    if np.any(xv <= 0.0):
        raise ValueError(f"g_fn requires x > 0, got {x}")
    # tanh(x)/x: series below 1e-5 to avoid 0/0 degradation
    small = xv < 1e-5
    safe = np.where(small, 1.0, xv)
    ratio = np.where(small, 1.0 - xv * xv / 3.0, np.tanh(safe) / safe)
    return 2.0 * (1.0 - params.alpha - params.alpha * xv * xv) * ratio + 2.0 * params.alpha


def linearized_potential(x, beta, params: ProblemParams):
    """Coefficient q(x) = Lambda(beta) h(x, alpha) exp(U(x; beta)).

    Algebraically simplified: zero on the middle interval and
    (eta/(1-alpha))^2 sech^2(eta (|x|-alpha) / (sqrt2 (1-alpha))) outside.
    """
    xv = _check_x(x)
    r = np.abs(xv)
    z = _outer_arg(r, beta, params)
    c = eta(beta) / params.outer_width
    return np.where(r < params.alpha, 0.0, c * c * np.exp(w_profile(z)))
