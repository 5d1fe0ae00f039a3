"""Compiled inner loops: linear shooting across a sech^2 segment and the
fixed-step RK4 re-integration oracle.

Everything here is scalar state marched across one segment; callers chain
segments and handle the piecewise bookkeeping.  The linearized equation is

    phi'' + (q(x) + mu) phi = 0,    q(x) = pamp / cosh(cq (x - xc))^2,

and the nonlinear re-integration target is u'' + lam * h * exp(u) = 0.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Fehlberg 4(5) embedded pair
_A21 = 1.0 / 4.0
_A31, _A32 = 3.0 / 32.0, 9.0 / 32.0
_A41, _A42, _A43 = 1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0
_A51, _A52, _A53, _A54 = 439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0
_A61, _A62, _A63, _A64, _A65 = -8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0
_B51, _B53, _B54, _B55, _B56 = 16.0 / 135.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0
_B41, _B43, _B44, _B45 = 25.0 / 216.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_TOO_MANY_STEPS = 2


@njit(cache=True)
def _sech2(t):
    # 4 e^{-2|t|} / (1 + e^{-2|t|})^2, overflow-free for any t
    a = abs(t)
    e = math.exp(-2.0 * a)
    return 4.0 * e / ((1.0 + e) * (1.0 + e))


@njit(cache=True)
def _log_cosh(t):
    a = abs(t)
    return a + math.log1p(math.exp(-2.0 * a)) - 0.6931471805599453


@njit(cache=True)
def shoot_segment(x0, x1, u0, v0, mu, pamp, cq, xc, rtol, atol, init_sign):
    """March (phi, phi') from x0 to x1 with adaptive Fehlberg 4(5).

    Counts strict sign changes of phi at accepted nodes (open interior of
    the segment; init_sign is the caller's confident sign of phi(x0), or 0
    when phi(x0) sits in the noise band so the joint is booked elsewhere).
    The step is capped below half the minimal zero spacing so no crossing
    pair can hide inside one step.

    Returns (u, v, zero_count, scale, status).
    """
    span = x1 - x0
    wmax = pamp + mu
    if wmax > 0.0:
        hmax = 0.45 * math.pi / math.sqrt(wmax)
    else:
        hmax = span
    if hmax > span / 8.0:
        hmax = span / 8.0
    h = hmax
    hmin = span * 1e-13

    x = x0
    u = u0
    v = v0
    scale = abs(u0)
    zeros = 0
    last_sign = init_sign

    nsteps = 0
    while x < x1:
        if nsteps > 2_000_000:
            return u, v, zeros, scale, STATUS_TOO_MANY_STEPS
        nsteps += 1
        if h > x1 - x:
            h = x1 - x
        # stages: f(x, u, v) = (v, -(q+mu) u)
        s = _sech2(cq * (x - xc))
        q1 = pamp * s + mu
        k1u = v
        k1v = -q1 * u

        xs = x + _A21 * h
        s = _sech2(cq * (xs - xc))
        q2 = pamp * s + mu
        uu = u + h * (_A21 * k1u)
        vv = v + h * (_A21 * k1v)
        k2u = vv
        k2v = -q2 * uu

        xs = x + 0.375 * h
        s = _sech2(cq * (xs - xc))
        q3 = pamp * s + mu
        uu = u + h * (_A31 * k1u + _A32 * k2u)
        vv = v + h * (_A31 * k1v + _A32 * k2v)
        k3u = vv
        k3v = -q3 * uu

        xs = x + (12.0 / 13.0) * h
        s = _sech2(cq * (xs - xc))
        q4 = pamp * s + mu
        uu = u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u)
        vv = v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        k4u = vv
        k4v = -q4 * uu

        xs = x + h
        s = _sech2(cq * (xs - xc))
        q5 = pamp * s + mu
        uu = u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u)
        vv = v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        k5u = vv
        k5v = -q5 * uu

        xs = x + 0.5 * h
        s = _sech2(cq * (xs - xc))
        q6 = pamp * s + mu
        uu = u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u)
        vv = v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        k6u = vv
        k6v = -q6 * uu

        u5 = u + h * (_B51 * k1u + _B53 * k3u + _B54 * k4u + _B55 * k5u + _B56 * k6u)
        v5 = v + h * (_B51 * k1v + _B53 * k3v + _B54 * k4v + _B55 * k5v + _B56 * k6v)
        u4 = u + h * (_B41 * k1u + _B43 * k3u + _B44 * k4u + _B45 * k5u)
        v4 = v + h * (_B41 * k1v + _B43 * k3v + _B44 * k4v + _B45 * k5v)

        du = abs(u5 - u4)
        dv = abs(v5 - v4)
        eu = du / (atol + rtol * (abs(u) + abs(u5)))
        ev = dv / (atol + rtol * (abs(v) + abs(v5)))
        err = eu if eu > ev else ev

        if err <= 1.0:
            x += h
            u = u5
            v = v5
            au = abs(u)
            if au > scale:
                scale = au
            if au > 1e-11 * scale:
                sgn = 1 if u > 0.0 else -1
                if last_sign != 0 and sgn != last_sign:
                    zeros += 1
                last_sign = sgn
        # PI-free step update
        if err > 0.0:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
            h *= fac
        else:
            h *= 5.0
        if h > hmax:
            h = hmax
        if h < hmin and x < x1:
            return u, v, zeros, scale, STATUS_STEP_UNDERFLOW
    return u, v, zeros, scale, STATUS_OK


@njit(cache=True)
def linear_grid_segment(xs, u0, v0, mu, pamp, cq, xc, nsub):
    """Fixed-step RK4 for the linearized equation through every node of xs.

    Returns (us, vs) sampled at the nodes; nsub substeps per node interval.
    """
    n = xs.shape[0]
    us = np.empty(n)
    vs = np.empty(n)
    u = u0
    v = v0
    us[0] = u
    vs[0] = v
    for i in range(n - 1):
        h = (xs[i + 1] - xs[i]) / nsub
        x = xs[i]
        for _ in range(nsub):
            s = _sech2(cq * (x - xc))
            qa = pamp * s + mu
            s = _sech2(cq * (x + 0.5 * h - xc))
            qb = pamp * s + mu
            s = _sech2(cq * (x + h - xc))
            qc = pamp * s + mu
            k1u = v
            k1v = -qa * u
            k2u = v + 0.5 * h * k1v
            k2v = -qb * (u + 0.5 * h * k1u)
            k3u = v + 0.5 * h * k2v
            k3v = -qb * (u + 0.5 * h * k2u)
            k4u = v + h * k3v
            k4v = -qc * (u + h * k3u)
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            x += h
        us[i + 1] = u
        vs[i + 1] = v
    return us, vs


@njit(cache=True)
def rk4_ode_segment(x0, x1, u0, v0, lam, weight, nsteps, kind, p1, p2, p3):
    """Fixed-step RK4 for u'' + lam * weight * exp(u) = 0 over one segment.

    Tracks the sup discrepancy against the segment's closed form at every
    node: kind 0 is the outer profile p1 - 2 log cosh(p2 (x - p3)), kind 1
    is the linear middle p1 + p2 x.  Returns (u, v, max_discrepancy).
    """
    h = (x1 - x0) / nsteps
    u = u0
    v = v0
    cw = lam * weight
    maxdisc = 0.0
    for i in range(nsteps):
        x = x0 + i * h
        k1u = v
        k1v = -cw * math.exp(u)
        k2u = v + 0.5 * h * k1v
        k2v = -cw * math.exp(u + 0.5 * h * k1u)
        k3u = v + 0.5 * h * k2v
        k3v = -cw * math.exp(u + 0.5 * h * k2u)
        k4u = v + h * k3v
        k4v = -cw * math.exp(u + h * k3u)
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        xn = x0 + (i + 1) * h
        if kind == 0:
            ucf = p1 - 2.0 * _log_cosh(p2 * (xn - p3))
        else:
            ucf = p1 + p2 * xn
        d = abs(u - ucf)
        if d > maxdisc:
            maxdisc = d
    return u, v, maxdisc
