"""Non-even positive solutions and the branch from the symmetry-breaking point.

A general positive solution is linear across the middle interval (where the
weight vanishes) and a translated, rescaled sech^2 profile on each outer
interval:

    u(x) = A + B x                                   on (-alpha, alpha),
    u(x) = log(2 d^2 / lam) - 2 log cosh(d (x - m))  on each outer interval,

with independent (d, m) per side.  Gluing value and slope at +-alpha and
imposing u(+-1) = 0 yields six equations in the seven unknowns

    y = (lam, A, B, d_left, m_left, d_right, m_right),

a one-parameter solution family.  The even family is the B = 0 slice; the
non-even branch leaves it where the odd linearized mode becomes null.  A
Newton corrector with one scalar constraint (a frozen coordinate, a frozen
sup-norm, or a pseudo-arclength condition) closes the system, and
`continue_branch` traces the branch from the symmetry-breaking amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SQRT2, ProblemParams, eta, lambda_of_beta
from .roots import SpecialPoints, special_points

__all__ = [
    "PiecewiseSolution",
    "Branch",
    "BranchPoint",
    "BoundsCheck",
    "FrozenScalar",
    "FrozenSupNorm",
    "ArclengthConstraint",
    "NewtonDivergenceError",
    "SingularJacobianError",
    "StepCollapseError",
    "StepControl",
    "even_embedding",
    "matching_residual",
    "matching_jacobian",
    "matching_jacobian_fd",
    "newton_solve",
    "continue_branch",
    "sup_norm_and_max_location",
    "lemma_bounds",
    "reflect",
    "symmetry_defect",
    "is_positive",
]

VAR_NAMES = ("lam", "A", "B", "d_left", "m_left", "d_right", "m_right")
_IDX = {name: i for i, name in enumerate(VAR_NAMES)}


class NewtonDivergenceError(RuntimeError):
    """Newton iteration failed to converge."""


class SingularJacobianError(RuntimeError):
    """The corrector Jacobian is numerically singular."""

    def __init__(self, message, cond=math.inf):
        self.cond = cond
        super().__init__(f"{message} (cond ~ {cond:.3e})")


class StepCollapseError(RuntimeError):
    """Adaptive arclength step underflowed; carries the partial branch."""

    def __init__(self, message, branch):
        self.branch = branch
        super().__init__(message)


def _log_cosh(t):
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def _sech2(t):
    a = np.abs(t)
    e = np.exp(-2.0 * a)
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class PiecewiseSolution:
    """Solution record: linear middle plus one sech^2 profile per outer side."""

    params: ProblemParams
    lam: float
    A: float
    B: float
    d_left: float
    m_left: float
    d_right: float
    m_right: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.d_left <= 0.0 or self.d_right <= 0.0:
            raise ValueError("profile steepness d must be positive on both sides")

    @property
    def amp_left(self) -> float:
        """Vertex height of the left outer profile, log(2 d_L^2 / lam)."""
        return math.log(2.0 * self.d_left**2 / self.lam)

    @property
    def amp_right(self) -> float:
        return math.log(2.0 * self.d_right**2 / self.lam)

    def u(self, x):
        xv = np.asarray(x, dtype=float)
        left = self.amp_left - 2.0 * _log_cosh(self.d_left * (xv - self.m_left))
        right = self.amp_right - 2.0 * _log_cosh(self.d_right * (xv - self.m_right))
        middle = self.A + self.B * xv
        return np.where(xv <= -self.params.alpha, left, np.where(xv >= self.params.alpha, right, middle))

    def u_prime(self, x):
        xv = np.asarray(x, dtype=float)
        left = -2.0 * self.d_left * np.tanh(self.d_left * (xv - self.m_left))
        right = -2.0 * self.d_right * np.tanh(self.d_right * (xv - self.m_right))
        return np.where(xv <= -self.params.alpha, left, np.where(xv >= self.params.alpha, right, self.B))

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.lam, self.A, self.B, self.d_left, self.m_left, self.d_right, self.m_right]
        )

    @classmethod
    def from_vector(cls, params: ProblemParams, y) -> "PiecewiseSolution":
        lam, A, B, dl, ml, dr, mr = (float(v) for v in y)
        return cls(params, lam, A, B, dl, ml, dr, mr)


def even_embedding(beta: float, params: ProblemParams) -> PiecewiseSolution:
    """The even solution of amplitude beta written as a PiecewiseSolution."""
    d = float(eta(beta)) / (SQRT2 * params.outer_width)
    return PiecewiseSolution(
        params=params,
        lam=float(lambda_of_beta(beta, params)),
        A=float(beta),
        B=0.0,
        d_left=d,
        m_left=-params.alpha,
        d_right=d,
        m_right=params.alpha,
    )


def matching_residual(sol: PiecewiseSolution) -> np.ndarray:
    """Six gluing residuals: boundary values, C^0 and C^1 joints at +-alpha.

    Ordered [u_R(1), u_R(a) - (A + B a), u_R'(a) - B,
             u_L(-1), u_L(-a) - (A - B a), u_L'(-a) - B].
    """
    a = sol.params.alpha
    ar, al = sol.amp_right, sol.amp_left
    dr, mr, dl, ml = sol.d_right, sol.m_right, sol.d_left, sol.m_left
    return np.array(
        [
            ar - 2.0 * _log_cosh(dr * (1.0 - mr)),
            ar - 2.0 * _log_cosh(dr * (a - mr)) - sol.A - sol.B * a,
            -2.0 * dr * math.tanh(dr * (a - mr)) - sol.B,
            al - 2.0 * _log_cosh(dl * (-1.0 - ml)),
            al - 2.0 * _log_cosh(dl * (-a - ml)) - sol.A + sol.B * a,
            -2.0 * dl * math.tanh(dl * (-a - ml)) - sol.B,
        ]
    )


def matching_jacobian(sol: PiecewiseSolution) -> np.ndarray:
    """Analytic 6x7 Jacobian of `matching_residual` in the order of VAR_NAMES."""
    a = sol.params.alpha
    lam, B = sol.lam, sol.B
    dr, mr, dl, ml = sol.d_right, sol.m_right, sol.d_left, sol.m_left

    th_r1 = dr * (1.0 - mr)
    th_ra = dr * (a - mr)
    th_l1 = dl * (-1.0 - ml)
    th_la = dl * (-a - ml)
    t_r1, t_ra = math.tanh(th_r1), math.tanh(th_ra)
    t_l1, t_la = math.tanh(th_l1), math.tanh(th_la)
    s_ra = float(_sech2(th_ra))
    s_la = float(_sech2(th_la))

    J = np.zeros((6, 7))
    # r1 = amp_R - 2 log cosh(th_r1)
    J[0, 0] = -1.0 / lam
    J[0, 5] = 2.0 / dr - 2.0 * (1.0 - mr) * t_r1
    J[0, 6] = 2.0 * dr * t_r1
    # r2 = amp_R - 2 log cosh(th_ra) - A - B a
    J[1, 0] = -1.0 / lam
    J[1, 1] = -1.0
    J[1, 2] = -a
    J[1, 5] = 2.0 / dr - 2.0 * (a - mr) * t_ra
    J[1, 6] = 2.0 * dr * t_ra
    # r3 = -2 dr tanh(th_ra) - B
    J[2, 2] = -1.0
    J[2, 5] = -2.0 * t_ra - 2.0 * dr * (a - mr) * s_ra
    J[2, 6] = 2.0 * dr * dr * s_ra
    # r4 = amp_L - 2 log cosh(th_l1)
    J[3, 0] = -1.0 / lam
    J[3, 3] = 2.0 / dl - 2.0 * (-1.0 - ml) * t_l1
    J[3, 4] = 2.0 * dl * t_l1
    # r5 = amp_L - 2 log cosh(th_la) - A + B a
    J[4, 0] = -1.0 / lam
    J[4, 1] = -1.0
    J[4, 2] = a
    J[4, 3] = 2.0 / dl - 2.0 * (-a - ml) * t_la
    J[4, 4] = 2.0 * dl * t_la
    # r6 = -2 dl tanh(th_la) - B
    J[5, 2] = -1.0
    J[5, 3] = -2.0 * t_la - 2.0 * dl * (-a - ml) * s_la
    J[5, 4] = 2.0 * dl * dl * s_la
    return J


def matching_jacobian_fd(sol: PiecewiseSolution, rel_step=1e-7) -> np.ndarray:
    """Central-difference Jacobian, the fallback the analytic one must match."""
    y0 = sol.as_vector()
    J = np.zeros((6, 7))
    for j in range(7):
        h = rel_step * max(1.0, abs(y0[j]))
        yp, ym = y0.copy(), y0.copy()
        yp[j] += h
        ym[j] -= h
        rp = matching_residual(PiecewiseSolution.from_vector(sol.params, yp))
        rm = matching_residual(PiecewiseSolution.from_vector(sol.params, ym))
        J[:, j] = (rp - rm) / (2.0 * h)
    return J


@dataclass(frozen=True)
class FrozenScalar:
    """Pins one coordinate of the unknown vector to a value."""

    name: str
    value: float

    def residual(self, y):
        return y[_IDX[self.name]] - self.value

    def gradient(self, y):
        g = np.zeros(7)
        g[_IDX[self.name]] = 1.0
        return g


@dataclass(frozen=True)
class FrozenSupNorm:
    """Pins the right-vertex height log(2 d_R^2 / lam) (the sup-norm for B >= 0)."""

    value: float

    def residual(self, y):
        return math.log(2.0 * y[_IDX["d_right"]] ** 2 / y[_IDX["lam"]]) - self.value

    def gradient(self, y):
        g = np.zeros(7)
        g[_IDX["lam"]] = -1.0 / y[_IDX["lam"]]
        g[_IDX["d_right"]] = 2.0 / y[_IDX["d_right"]]
        return g


@dataclass(frozen=True)
class ArclengthConstraint:
    """Pseudo-arclength condition in magnitude-weighted coordinates."""

    base: np.ndarray
    tangent: np.ndarray  # unit vector in scaled coordinates
    scale: np.ndarray
    ds: float

    def residual(self, y):
        return float(np.dot(self.tangent, (y - self.base) / self.scale)) - self.ds

    def gradient(self, y):
        return self.tangent / self.scale


def _vector_ok(y) -> bool:
    return y[0] > 0.0 and y[3] > 0.0 and y[5] > 0.0 and np.all(np.isfinite(y))


def newton_solve(initial: PiecewiseSolution, frozen, tol=1e-12, max_iter=30) -> PiecewiseSolution:
    """Newton corrector for the 6 matching equations plus one scalar constraint.

    `frozen` is a FrozenScalar, FrozenSupNorm, or ArclengthConstraint closing
    the 7-unknown system.  Converges to max-norm residual below `tol` or
    raises NewtonDivergenceError; a singular corrector matrix raises
    SingularJacobianError with a condition estimate.
    """
    params = initial.params
    y = initial.as_vector()
    if not _vector_ok(y):
        raise ValueError("initial point outside the admissible region")
    for _ in range(max_iter):
        sol = PiecewiseSolution.from_vector(params, y)
        F = np.append(matching_residual(sol), frozen.residual(y))
        if np.max(np.abs(F)) < tol:
            return sol
        J = np.vstack([matching_jacobian(sol), frozen.gradient(y)])
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError("corrector Jacobian singular", np.linalg.cond(J)) from exc
        if not np.all(np.isfinite(delta)) or np.linalg.norm(delta) > 1e12:
            raise NewtonDivergenceError(f"Newton step blew up: |delta|={np.linalg.norm(delta):.3e}")
        t = 1.0
        while t > 1e-10 and not _vector_ok(y + t * delta):
            t *= 0.5
        if t <= 1e-10:
            raise NewtonDivergenceError("could not damp the step into the admissible region")
        y = y + t * delta
    sol = PiecewiseSolution.from_vector(params, y)
    res = float(np.max(np.abs(np.append(matching_residual(sol), frozen.residual(y)))))
    raise NewtonDivergenceError(f"no convergence after {max_iter} iterations (residual {res:.3e})")


def sup_norm_and_max_location(sol: PiecewiseSolution):
    """Sup-norm of the solution and where it is attained.

    Closed form per segment: an outer vertex when its center lies inside the
    segment, otherwise segment endpoints; the linear middle peaks at the
    endpoint selected by the sign of B.  The even plateau reports location
    alpha by convention.
    """
    a = sol.params.alpha
    candidates = []
    if a <= sol.m_right < 1.0:
        candidates.append((sol.amp_right, sol.m_right))
    if -1.0 < sol.m_left <= -a:
        candidates.append((sol.amp_left, sol.m_left))
    mid_loc = a if sol.B >= 0.0 else -a
    candidates.append((sol.A + abs(sol.B) * a, mid_loc))
    candidates.append((float(sol.u(-a)), -a))
    candidates.append((float(sol.u(a)), a))
    value, loc = max(candidates, key=lambda c: c[0])
    return value, loc


@dataclass(frozen=True)
class BoundsCheck:
    """Load bounds of a positive solution against its sup-norm."""

    lower_ok: bool  # Lambda(sup) <= lam
    upper_ok: bool  # lam < 4 Lambda(sup)
    identity_residual: float  # |lam - ((1-a)/(1-m))^2 Lambda(sup)|

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def lemma_bounds(sol: PiecewiseSolution) -> BoundsCheck:
    sup, m = sup_norm_and_max_location(sol)
    lam_sup = float(lambda_of_beta(sup, sol.params))
    slack = 1e-10 * (1.0 + sol.lam)
    predicted = (sol.params.outer_width / (1.0 - abs(m))) ** 2 * lam_sup
    return BoundsCheck(
        lower_ok=lam_sup <= sol.lam + slack,
        upper_ok=sol.lam < 4.0 * lam_sup,
        identity_residual=abs(sol.lam - predicted),
    )


def reflect(sol: PiecewiseSolution) -> PiecewiseSolution:
    """Mirror solution x -> u(-x); an involution fixing the even family."""
    return PiecewiseSolution(
        params=sol.params,
        lam=sol.lam,
        A=sol.A,
        B=-sol.B,
        d_left=sol.d_right,
        m_left=-sol.m_right,
        d_right=sol.d_left,
        m_right=-sol.m_left,
    )


def symmetry_defect(sol: PiecewiseSolution, n=1025) -> float:
    """Sup of |u(x) - u(-x)| over a symmetric grid."""
    x = np.linspace(0.0, 1.0, n)
    return float(np.max(np.abs(sol.u(x) - sol.u(-x))))


def is_positive(sol: PiecewiseSolution, n=2048) -> bool:
    """Positivity of u on a fine interior grid."""
    x = np.linspace(-1.0, 1.0, n + 2)[1:-1]
    return bool(np.min(sol.u(x)) > 0.0)


@dataclass(frozen=True)
class BranchPoint:
    s: float
    solution: PiecewiseSolution
    sup_norm: float
    max_location: float
    asymmetry: float
    corrector_cond: float  # condition of the accepted corrector matrix; logged, not interpreted


@dataclass(frozen=True)
class Branch:
    """Arclength-ordered non-even solutions emanating from the even family."""

    origin: SpecialPoints
    points: tuple


@dataclass(frozen=True)
class StepControl:
    initial: float = 0.02
    minimum: float = 1e-9
    maximum: float = 0.10
    grow: float = 2.0
    easy_accepts: int = 3


def _scaled(y_new, y_old, scale):
    return (y_new - y_old) / scale


def _make_point(s, sol, constraint):
    sup, loc = sup_norm_and_max_location(sol)
    corrector = np.vstack([matching_jacobian(sol), constraint.gradient(sol.as_vector())])
    return BranchPoint(
        s=s,
        solution=sol,
        sup_norm=sup,
        max_location=loc,
        asymmetry=symmetry_defect(sol),
        corrector_cond=float(np.linalg.cond(corrector)),
    )


def continue_branch(
    params: ProblemParams,
    *,
    step: StepControl | None = None,
    min_lambda=1e-6,
    max_supnorm=30.0,
    max_points=5000,
    direction=+1,
    newton_tol=1e-12,
    residual_tol=1e-10,
    seed_perturbation=1e-3,
) -> Branch:
    """Trace the non-even branch from the symmetry-breaking amplitude.

    The first point is obtained by freezing the middle slope at a small
    perturbation (sign given by `direction`, so +1 canonicalizes to B > 0);
    subsequent points by pseudo-arclength prediction-correction with step
    halving on failure and doubling after repeated easy accepts.  Stops at
    min_lambda, max_supnorm, or max_points; a step underflow raises
    StepCollapseError carrying the partial branch.

    Every accepted point is required to pass the matching residual at
    `residual_tol`, the load bounds against its sup-norm, positivity, and a
    tangent-consistency check (no doubling back through the bifurcation).
    """
    if step is None:
        step = StepControl()
    sp = special_points(params)
    even0 = even_embedding(sp.beta2, params)
    y0 = even0.as_vector()

    eps = float(direction) * seed_perturbation * max(1.0, abs(sp.beta2))
    seed_vec = y0.copy()
    seed_vec[_IDX["B"]] = eps
    seed_constraint = FrozenScalar("B", eps)
    first = newton_solve(
        PiecewiseSolution.from_vector(params, seed_vec), seed_constraint, tol=newton_tol
    )
    if float(np.max(np.abs(matching_residual(first)))) >= residual_tol:
        raise NewtonDivergenceError("branch seed did not reach the residual tolerance")

    scale = np.maximum(np.abs(first.as_vector()), 1e-2)
    diff = _scaled(first.as_vector(), y0, scale)
    s_acc = float(np.linalg.norm(diff))
    tangent = diff / np.linalg.norm(diff)
    points = [_make_point(s_acc, first, seed_constraint)]

    y_prev = first.as_vector()
    ds = step.initial
    easy = 0
    while len(points) < max_points:
        prev_point = points[-1]
        if prev_point.sup_norm >= max_supnorm or prev_point.solution.lam <= min_lambda:
            break
        predictor = y_prev + ds * tangent * scale
        if not _vector_ok(predictor):
            predictor = y_prev.copy()
        accepted = None
        try:
            constraint = ArclengthConstraint(base=y_prev.copy(), tangent=tangent.copy(), scale=scale.copy(), ds=ds)
            cand = newton_solve(
                PiecewiseSolution.from_vector(params, predictor), constraint, tol=newton_tol
            )
            y_new = cand.as_vector()
            diff = _scaled(y_new, y_prev, scale)
            if (
                float(np.dot(diff / np.linalg.norm(diff), tangent)) > 0.0
                and float(np.max(np.abs(matching_residual(cand)))) < residual_tol
                and lemma_bounds(cand).ok
                and is_positive(cand)
            ):
                accepted = cand
        except (NewtonDivergenceError, SingularJacobianError):
            accepted = None
        if accepted is None:
            ds *= 0.5
            easy = 0
            if ds < step.minimum:
                raise StepCollapseError(
                    f"arclength step collapsed below {step.minimum}",
                    Branch(origin=sp, points=tuple(points)),
                )
            continue
        y_new = accepted.as_vector()
        diff = _scaled(y_new, y_prev, scale)
        s_acc += float(np.linalg.norm(diff))
        points.append(_make_point(s_acc, accepted, constraint))
        tangent = diff / np.linalg.norm(diff)
        y_prev = y_new
        scale = np.maximum(np.abs(y_new), 1e-2)
        easy += 1
        if easy >= step.easy_accepts:
            ds = min(ds * step.grow, step.maximum)
            easy = 0
    return Branch(origin=sp, points=tuple(points))
