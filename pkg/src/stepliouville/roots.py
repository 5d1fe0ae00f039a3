"""Special amplitudes and inversion of the load map.

Two amplitudes organize the whole solution structure:

  * beta1 -- the fold of the load curve lam = Lambda(beta), the unique root
    of sqrt(1-exp(-b)) * arctanh(sqrt(1-exp(-b))) = 1.  It does not depend
    on alpha.
  * beta2 -- the symmetry-breaking amplitude, the unique root of
    varphi(1; beta) = 0 (equivalently of g(eta(beta)/sqrt2) = 0).  It
    depends on alpha and always exceeds beta1.

Both are proven unique roots of monotone scalar functions, so plain
bracketing (bisection plus a secant polish) is the whole story.  The same
machinery inverts Lambda on its two monotone pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ProblemParams, lambda_of_beta, varphi

__all__ = [
    "NoSignChangeError",
    "SpecialPoints",
    "bracketed_root",
    "solve_beta1",
    "solve_beta2",
    "invert_lambda",
    "special_points",
]

# default bracket: the roots of interest are proven unique and far inside
BETA_BRACKET = (1e-6, 50.0)


class NoSignChangeError(ValueError):
    """The supplied bracket does not straddle a sign change."""


def bracketed_root(f, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Root of a scalar function on a sign-changing bracket.

    Deterministic bisection to machine-width bracket, then a short secant
    polish; `tol` is an absolute tolerance on the residual |f(root)|, not on
    the abscissa.  Raises NoSignChangeError when f(lo) and f(hi) have the
    same sign.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    a, b, fa, fb = lo, hi, flo, fhi
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    # secant polish inside the final bracket, starting from the better end
    if abs(fa) <= abs(fb):
        root, fr, xo, fo = a, fa, b, fb
    else:
        root, fr, xo, fo = b, fb, a, fa
    for _ in range(4):
        if abs(fr) <= tol or fr == fo:
            break
        step = fr * (root - xo) / (fr - fo)
        cand = root - step
        if not (min(a, b) <= cand <= max(a, b)):
            break
        xo, fo = root, fr
        root, fr = cand, f(cand)
    return root


def _beta1_residual(beta: float) -> float:
    """Defining equation of the fold: s * arctanh(s) - 1, s = sqrt(1-exp(-beta)).

    arctanh(s) is evaluated through the exact rewrite beta/2 + log(1+s),
    which survives s rounding to 1 for beta beyond ~36.
    """
    s = math.sqrt(-math.expm1(-beta))
    return s * (0.5 * beta + math.log1p(s)) - 1.0


def solve_beta1() -> float:
    """Fold amplitude beta1; alpha-independent.

    Polished so that the defining-equation residual is below 1e-14.
    """
    root = bracketed_root(_beta1_residual, *BETA_BRACKET, tol=1e-15)
    if abs(_beta1_residual(root)) > 1e-14:
        raise RuntimeError("beta1 solver failed to reach residual 1e-14")
    return root


def solve_beta2(params: ProblemParams) -> float:
    """Symmetry-breaking amplitude beta2: unique root of varphi(1; beta) = 0."""

    def f(beta: float) -> float:
        return float(varphi(1.0, beta, params))

    root = bracketed_root(f, *BETA_BRACKET, tol=1e-13)
    if abs(f(root)) > 1e-12:
        raise RuntimeError("beta2 solver failed to reach residual 1e-12")
    return root


@dataclass(frozen=True)
class SpecialPoints:
    """The two organizing amplitudes and their loads for one alpha."""

    alpha: float
    beta1: float
    beta2: float
    lambda1: float
    lambda2: float


def special_points(params: ProblemParams) -> SpecialPoints:
    b1 = solve_beta1()
    b2 = solve_beta2(params)
    if not b1 < b2:
        raise RuntimeError(f"expected beta1 < beta2, got {b1} >= {b2}")
    return SpecialPoints(
        alpha=params.alpha,
        beta1=b1,
        beta2=b2,
        lambda1=float(lambda_of_beta(b1, params)),
        lambda2=float(lambda_of_beta(b2, params)),
    )


def invert_lambda(lam: float, params: ProblemParams):
    """Both amplitudes with Lambda(beta) = lam, or what exists of them.

    Returns (beta_lower, beta_upper):
      * lam <  lambda1: both roots, one on each monotone piece;
      * lam == lambda1 (to a few ulps): the double root (beta1, beta1);
      * lam >  lambda1: (None, None).
    """
    if not lam > 0.0:
        raise ValueError(f"invert_lambda requires lam > 0, got {lam}")
    b1 = solve_beta1()
    lam1 = float(lambda_of_beta(b1, params))
    if lam > lam1:
        return (None, None)
    if abs(lam - lam1) <= 4.0 * math.ulp(lam1):
        return (b1, b1)

    def f(beta: float) -> float:
        return float(lambda_of_beta(beta, params)) - lam

    lo = b1
    while f(lo) > 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise RuntimeError("failed to bracket the lower branch")
    beta_lower = bracketed_root(f, lo, b1, tol=1e-13 * max(lam, 1.0))

    hi = 2.0 * b1
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("failed to bracket the upper branch")
    beta_upper = bracketed_root(f, b1, hi, tol=1e-13 * max(lam, 1.0))
    return (beta_lower, beta_upper)
