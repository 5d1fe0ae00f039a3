"""Eigenvalues of the linearization around even solutions.

The second-variation eigenvalue problem at the even solution of amplitude
beta is

    phi'' + [q(x) + mu] phi = 0,   phi(-1) = phi(1) = 0,

with q the step-localized sech^2 potential from `core.linearized_potential`.
The solver shoots from x = -1 with phi'(-1) = 1: the middle interval (zero
potential) is propagated in closed form, the outer intervals by an adaptive
embedded Runge-Kutta kernel.  Interior zeros of the shot solution count the
eigenvalues below mu (classical oscillation argument), which both brackets
each eigenvalue and yields the Morse index from a single shot at mu = 0.

An independent finite-difference discretization (`eigenvalues_matrix`)
cross-validates the shooting eigenvalues at second order in the mesh width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from ._kernels import STATUS_OK, linear_grid_segment, shoot_segment
from .core import SQRT2, ProblemParams, eta

__all__ = [
    "Spectrum",
    "IntegrationError",
    "EigenSearchError",
    "DegenerateSolutionError",
    "shoot_linearized",
    "eigenvalues",
    "morse_index",
    "eigenfunction",
    "eigenvalues_matrix",
]

_ZTOL_REL = 1e-11  # noise band for "this node is a zero", relative to running scale


class IntegrationError(RuntimeError):
    """The adaptive integrator failed to cross a segment."""


class EigenSearchError(RuntimeError):
    """Eigenvalue bracketing exhausted its search window."""


class DegenerateSolutionError(RuntimeError):
    """An eigenvalue sits inside the degeneracy tolerance band.

    Carries the Morse index counted outside the band, the offending
    eigenvalue, and the tolerance that was applied.
    """

    def __init__(self, beta, nearest_mu, tol, morse_outside_band):
        self.beta = beta
        self.nearest_mu = nearest_mu
        self.tol = tol
        self.morse_outside_band = morse_outside_band
        super().__init__(
            f"degenerate within tolerance at beta={beta}: |mu|={abs(nearest_mu):.3e} < {tol:.3e}"
        )


@dataclass(frozen=True)
class Spectrum:
    """Ordered eigenvalues with Morse index and degeneracy flag."""

    beta: float
    params: ProblemParams
    eigenvalues: tuple
    morse_index: int
    degenerate: bool
    degeneracy_tol: float


def _potential_params(beta, params):
    """Peak value and inverse width of q(x) = pamp * sech^2(cq (|x| - alpha))."""
    e = float(eta(beta))
    width = params.outer_width
    return (e / width) ** 2, e / (SQRT2 * width)


def _middle_transfer(mu, length):
    """Exact 2x2 propagator of phi'' + mu phi = 0 over the middle interval."""
    if mu > 0.0:
        k = math.sqrt(mu)
        kl = k * length
        c = math.cos(kl)
        s_over_k = length * (1.0 - kl * kl / 6.0) if kl < 1e-8 else math.sin(kl) / k
    elif mu < 0.0:
        k = math.sqrt(-mu)
        kl = k * length
        c = math.cosh(kl)
        s_over_k = length * (1.0 + kl * kl / 6.0) if kl < 1e-8 else math.sinh(kl) / k
    else:
        return 1.0, length, 0.0, 1.0
    return c, s_over_k, -mu * s_over_k, c


def _middle_zero_count(u0, v0, mu, length, ztol):
    """Zeros of the closed-form middle solution strictly inside (0, length)."""
    margin = 1e-10 * length
    if mu > 0.0:
        k = math.sqrt(mu)
        # u(t) = R sin(k t + delta), delta = atan2(u0, v0/k)
        delta = math.atan2(u0, v0 / k)
        count = 0
        n_lo = int(math.floor(delta / math.pi)) - 1
        n_hi = int(math.ceil((delta + k * length) / math.pi)) + 1
        for n in range(n_lo, n_hi + 1):
            t = (n * math.pi - delta) / k
            if margin < t < length - margin:
                count += 1
        return count
    # mu <= 0: at most one zero, detected by a confident sign change
    t11, t12, _, _ = _middle_transfer(mu, length)
    u1 = u0 * t11 + v0 * t12
    if abs(u0) > ztol and abs(u1) > ztol and (u0 > 0.0) != (u1 > 0.0):
        return 1
    return 0


def _confident_sign(value, ztol):
    if abs(value) <= ztol:
        return 0
    return 1 if value > 0.0 else -1


def shoot_linearized(mu, beta, params: ProblemParams, rtol=1e-11, atol=1e-13):
    """Shoot phi(-1) = 0, phi'(-1) = 1 across all three segments.

    Returns (endpoint_value, interior_zero_count): phi(1) and the number of
    zeros of phi in the open interval (-1, 1), joints counted once.
    """
    if beta <= 0.0:
        raise ValueError(f"shoot_linearized requires beta > 0, got {beta}")
    pamp, cq = _potential_params(beta, params)
    a = params.alpha
    mu = float(mu)

    u, v, z_left, scale, status = shoot_segment(
        -1.0, -a, 0.0, 1.0, mu, pamp, cq, -a, rtol, atol, 0
    )
    if status != STATUS_OK:
        raise IntegrationError(f"left segment integration failed (status {status})")
    zeros = z_left
    scale = max(scale, abs(u), 1e-300)
    ztol = _ZTOL_REL * scale

    # joint at -alpha belongs to the middle piece
    if abs(u) <= ztol:
        zeros += 1
    zeros += _middle_zero_count(u, v, mu, 2.0 * a, ztol)
    t11, t12, t21, t22 = _middle_transfer(mu, 2.0 * a)
    u, v = u * t11 + v * t12, u * t21 + v * t22

    scale = max(scale, abs(u))
    ztol = _ZTOL_REL * scale
    init_sign = _confident_sign(u, ztol)
    if init_sign == 0:
        zeros += 1
    u, v, z_right, scale_r, status = shoot_segment(
        1.0 * a, 1.0, u, v, mu, pamp, cq, a, rtol, atol, init_sign
    )
    if status != STATUS_OK:
        raise IntegrationError(f"right segment integration failed (status {status})")
    zeros += z_right
    return float(u), int(zeros)


class _ShootCache:
    """Memoized (endpoint, zero count) evaluations for one (beta, params)."""

    def __init__(self, beta, params, rtol, atol):
        self.beta = beta
        self.params = params
        self.rtol = rtol
        self.atol = atol
        self._data = {}

    def __call__(self, mu):
        hit = self._data.get(mu)
        if hit is None:
            hit = shoot_linearized(mu, self.beta, self.params, self.rtol, self.atol)
            self._data[mu] = hit
        return hit

    def endpoint(self, mu):
        return self(mu)[0]

    def zeros(self, mu):
        return self(mu)[1]


def _bracket_by_count(shoot, k, lo, hi):
    """Shrink [lo, hi] to a sign-changing bracket around the k-th eigenvalue.

    Uses the zero-count staircase: the count steps from k-1 to k exactly at
    mu_k, where the endpoint also changes sign.
    """
    a, b = lo, hi
    for _ in range(220):
        ca, cb = shoot.zeros(a), shoot.zeros(b)
        if (
            ca == k - 1
            and cb == k
            and shoot.endpoint(a) * shoot.endpoint(b) < 0.0
        ):
            return a, b
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        if shoot.zeros(mid) >= k:
            b = mid
        else:
            a = mid
    if shoot.endpoint(a) * shoot.endpoint(b) < 0.0:
        return a, b
    raise EigenSearchError(
        f"could not isolate eigenvalue {k} in [{a}, {b}] "
        f"(counts {shoot.zeros(a)}, {shoot.zeros(b)})"
    )


def eigenvalues(beta, params: ProblemParams, count=3, *, mu_cap=1e8, rtol=1e-11, atol=1e-13):
    """The smallest `count` eigenvalues, each polished on the endpoint map.

    The search window opens at -(peak potential + 1), a variational lower
    bound for the ground state, and expands upward geometrically until it
    contains `count` eigenvalues; exceeding `mu_cap` raises EigenSearchError.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n_solve = max(count, 2)  # the degeneracy band is scaled by mu2 - mu1
    shoot = _ShootCache(beta, params, rtol, atol)
    pamp, _ = _potential_params(beta, params)
    lo = -(pamp + 1.0)
    hi = max(10.0, 0.5 * pamp)
    while shoot.zeros(hi) < n_solve:
        hi = 2.0 * hi + 10.0
        if hi > mu_cap:
            raise EigenSearchError(f"no {n_solve} eigenvalues below mu = {mu_cap}")

    mus = []
    for k in range(1, n_solve + 1):
        a, b = _bracket_by_count(shoot, k, lo, hi)
        root = brentq(shoot.endpoint, a, b, xtol=1e-14, rtol=4.0 * np.finfo(float).eps, maxiter=300)
        # secant polish on the endpoint residual
        e_root = shoot.endpoint(root)
        other, e_other = a, shoot.endpoint(a)
        for _ in range(6):
            if abs(e_root) < 1e-10 or e_root == e_other:
                break
            cand = root - e_root * (root - other) / (e_root - e_other)
            if not (a <= cand <= b):
                break
            other, e_other = root, e_root
            root, e_root = cand, shoot.endpoint(cand)
        mus.append(root)

    for i in range(len(mus) - 1):
        if not mus[i] < mus[i + 1]:
            raise EigenSearchError(f"eigenvalues not strictly ordered: {mus}")

    tol = 1e-8 * (1.0 + abs(mus[1] - mus[0]))
    kept = mus[:count]
    return Spectrum(
        beta=beta,
        params=params,
        eigenvalues=tuple(kept),
        morse_index=sum(1 for m in kept if m < -tol),
        degenerate=any(abs(m) < tol for m in kept),
        degeneracy_tol=tol,
    )


def morse_index(beta, params: ProblemParams):
    """Number of negative eigenvalues at the even solution of amplitude beta.

    A single shot at mu = 0 counts them through the oscillation argument; a
    full spectrum is only computed when the shot lands close enough to a
    degeneracy to need the exact tolerance band, in which case a
    DegenerateSolutionError is raised if the band is hit.
    """
    if beta <= 0.0:
        raise ValueError(f"morse_index requires beta > 0, got {beta}")
    e0, count0 = shoot_linearized(0.0, beta, params)
    delta = 1e-6
    e1, _ = shoot_linearized(delta, beta, params)
    slope = (e1 - e0) / delta
    mu_near = math.inf if slope == 0.0 else -e0 / slope
    pamp, _ = _potential_params(beta, params)
    coarse_band = 4e-8 * (1.0 + pamp + 50.0)
    if abs(mu_near) > max(coarse_band, 1e-6):
        return count0
    spec = eigenvalues(beta, params, count=max(count0 + 1, 2))
    if spec.degenerate:
        nearest = min(spec.eigenvalues, key=abs)
        raise DegenerateSolutionError(beta, nearest, spec.degeneracy_tol, spec.morse_index)
    return spec.morse_index


def eigenfunction(beta, params: ProblemParams, k, grid, mu=None):
    """Samples of the k-th eigenfunction on `grid`, sup-normalized.

    The sign convention is phi'(-1) > 0.  When `mu` is omitted the k-th
    eigenvalue is computed first.
    """
    if mu is None:
        mu = eigenvalues(beta, params, count=k).eigenvalues[k - 1]
    mu = float(mu)
    xs = np.asarray(grid, dtype=float)
    if np.any(np.diff(xs) <= 0.0) or xs[0] < -1.0 - 1e-12 or xs[-1] > 1.0 + 1e-12:
        raise ValueError("grid must be strictly increasing within [-1, 1]")
    a = params.alpha
    pamp, cq = _potential_params(beta, params)
    h_target = min(1e-3, 0.1 / math.sqrt(pamp + abs(mu) + 1.0))

    phi = np.empty_like(xs)
    u, v = 0.0, 1.0

    def run_segment(x_lo, x_hi, xc, u, v):
        sel = (xs > x_lo) & (xs < x_hi)
        nodes = np.concatenate(([x_lo], xs[sel], [x_hi]))
        nsub = max(8, int(math.ceil((x_hi - x_lo) / (len(nodes) - 1) / h_target)))
        us, vs = linear_grid_segment(nodes, u, v, mu, pamp, cq, xc, nsub)
        return sel, us, vs

    # left outer segment
    sel, us, vs = run_segment(-1.0, -a, -a, u, v)
    phi[sel] = us[1:-1]
    phi[xs <= -1.0 + 1e-15] = 0.0
    u, v = us[-1], vs[-1]
    u_alpha_l, v_alpha_l = u, v
    phi[np.isclose(xs, -a, rtol=0.0, atol=1e-15)] = u

    # middle interval, closed form
    mid = (xs > -a) & (xs < a)
    t = xs[mid] + a
    if mu > 0.0:
        kk = math.sqrt(mu)
        phi[mid] = u * np.cos(kk * t) + v * np.sin(kk * t) / kk
    elif mu < 0.0:
        kk = math.sqrt(-mu)
        phi[mid] = u * np.cosh(kk * t) + v * np.sinh(kk * t) / kk
    else:
        phi[mid] = u + v * t
    t11, t12, t21, t22 = _middle_transfer(mu, 2.0 * a)
    u, v = u * t11 + v * t12, u * t21 + v * t22
    phi[np.isclose(xs, a, rtol=0.0, atol=1e-15)] = u

    # right outer segment
    sel, us, vs = run_segment(a, 1.0, a, u, v)
    phi[sel] = us[1:-1]
    phi[xs >= 1.0 - 1e-15] = us[-1]

    peak = np.max(np.abs(phi))
    if peak == 0.0:
        raise RuntimeError("eigenfunction identically zero on grid")
    return phi / peak


def _aligned_interior_count(n_request, alpha):
    """Smallest n >= n_request whose node set contains +-alpha exactly.

    With n interior nodes the spacing is h = 2/(n+1); +-alpha land on nodes
    (hence at midpoints of their potential-averaging cells) when
    (n+1)(1+alpha)/2 is an integer.  Falls back to n_request when alpha
    admits no such grid nearby.
    """
    for n in range(n_request, n_request + 4096):
        t = 0.5 * (n + 1) * (1.0 + alpha)
        if abs(t - round(t)) < 1e-9 * (n + 1):
            return n
    return n_request


def eigenvalues_matrix(beta, params: ProblemParams, count, n_grid=800):
    """Cross-validation oracle: finite differences on a potential-averaged grid.

    Second-order central differences on n interior nodes, with the sech^2
    potential integrated exactly over each node's cell so the step
    discontinuity at +-alpha is averaged rather than sampled; the grid size
    is nudged so +-alpha fall on nodes.  Returns the `count` smallest
    eigenvalues of the symmetric tridiagonal matrix.
    """
    if n_grid < 200:
        raise ValueError("n_grid must be >= 200")
    a = params.alpha
    pamp, cq = _potential_params(beta, params)
    n = _aligned_interior_count(n_grid, a)
    h = 2.0 / (n + 1)
    nodes = -1.0 + h * np.arange(1, n + 1)

    def antideriv(x):
        # integral of q from 0 to x (odd in x, flat across the middle)
        r = np.abs(x)
        val = np.where(r > a, (pamp / cq) * np.tanh(cq * (r - a)), 0.0)
        return np.sign(x) * val

    qbar = (antideriv(nodes + 0.5 * h) - antideriv(nodes - 0.5 * h)) / h
    diag = 2.0 / h**2 - qbar
    off = np.full(n - 1, -1.0 / h**2)
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
