import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepliouville.core import (
    ProblemParams,
    EvenSolution,
    SQRT2,
    c1,
    d_lambda,
    eta,
    eta_prime,
    g_fn,
    lambda_of_beta,
    linearized_potential,
    psi,
    psi_xx,
    u_even,
    u_even_prime,
    varphi,
    varphi_xx,
    w_prime,
    w_profile,
    w_second,
)
from stepliouville.roots import solve_beta1, solve_beta2

import reference_values as ref

P_HALF = ProblemParams(0.5)


class TestProblemParams:
    def test_rejects_alpha_outside_open_interval(self):
        for bad in (0.0, 1.0, -0.1, 1.7):
            with pytest.raises(ValueError):
                ProblemParams(bad)

    def test_weight_is_the_step_function(self):
        p = ProblemParams(0.3)
        x = np.array([-1.0, -0.31, -0.29, 0.0, 0.29, 0.31, 1.0])
        assert np.array_equal(p.weight(x), [1, 1, 0, 0, 0, 1, 1])


class TestProfile:
    def test_initial_conditions(self):
        assert w_profile(0.0) == 0.0
        assert w_prime(0.0) == 0.0

    def test_profile_inverts_eta(self):
        for b in (0.5, 1.0, 2.0):
            assert float(w_profile(eta(b))) == pytest.approx(-b, abs=1e-13)

    def test_defining_ode_residual(self):
        # w'' = -e^w identically; cross-check the closed form against a
        # five-point finite difference of w itself
        x = np.linspace(-10, 10, 401)
        assert np.max(np.abs(w_second(x) + np.exp(w_profile(x)))) < 1e-12
        h = 1e-3
        fd = (
            -w_profile(x + 2 * h)
            + 16 * w_profile(x + h)
            - 30 * w_profile(x)
            + 16 * w_profile(x - h)
            - w_profile(x - 2 * h)
        ) / (12 * h * h)
        assert np.max(np.abs(fd + np.exp(w_profile(x)))) < 1e-8

    def test_signs_and_evenness(self):
        x = np.linspace(0.01, 30, 500)
        assert np.all(w_profile(x) < 0)
        assert np.all(w_prime(x) < 0)
        assert np.allclose(w_profile(-x), w_profile(x), rtol=0, atol=0)

    def test_stable_form_matches_naive_log(self):
        # the naive log(1 - tanh^2) keeps 1e-12 accuracy only at moderate
        # arguments (cancellation in 1 - tanh^2 grows like e^{2|x|})
        x = np.linspace(-6, 6, 301)
        naive = np.log(1.0 - np.tanh(x / SQRT2) ** 2)
        assert np.max(np.abs(w_profile(x) - naive)) < 1e-12

    def test_no_overflow_far_out(self):
        assert np.isfinite(w_profile(1e6))
        assert float(w_profile(1e6)) == pytest.approx(-SQRT2 * 1e6 + 2 * math.log(2), rel=1e-12)


class TestEta:
    def test_endpoint_and_monotonicity(self):
        assert float(eta(0.0)) == 0.0
        b = np.linspace(1e-6, 60, 800)
        assert np.all(np.diff(eta(b)) > 0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            eta(-0.5)
        with pytest.raises(ValueError):
            eta_prime(0.0)

    def test_value_against_oracle(self):
        assert float(eta(1.0)) == pytest.approx(ref.ETA_AT_1, rel=1e-15)

    def test_fold_identity(self):
        # at the fold amplitude, eta(b) w'(eta(b)) + 2 = 0
        b1 = solve_beta1()
        assert float(eta(b1) * w_prime(eta(b1))) == pytest.approx(-2.0, abs=1e-13)

    def test_stable_form_matches_naive_arctanh(self):
        # moderate amplitudes, where 1 - sqrt(1-e^-b) still carries enough
        # bits for the naive arctanh to be trustworthy at 1e-12
        b = np.linspace(0.5, 8, 118)
        naive = SQRT2 * np.arctanh(np.sqrt(1 - np.exp(-b)))
        assert np.max(np.abs(eta(b) - naive)) < 1e-12

    def test_prime_consistent_with_inverse_rule(self):
        b = np.linspace(0.05, 20, 97)
        assert np.max(np.abs(eta_prime(b) + 1.0 / w_prime(eta(b)))) < 1e-12

    @given(st.floats(min_value=1e-8, max_value=10.0))
    @settings(max_examples=60, deadline=None)
    def test_inverse_pair_property(self, x):
        assert float(eta(-w_profile(x))) == pytest.approx(x, abs=1e-10)

    def test_inverse_pair_on_grid(self):
        x = np.linspace(0.0, 10.0, 257)
        assert np.max(np.abs(eta(-w_profile(x)) - x)) < 1e-10


class TestLambda:
    def test_vanishing_limits(self):
        assert float(lambda_of_beta(1e-8, P_HALF)) < 1e-7
        assert float(lambda_of_beta(50.0, P_HALF)) < 1e-3
        assert float(lambda_of_beta(50.0, P_HALF)) == pytest.approx(
            ref.LAMBDA_AT_50_ALPHA_HALF, rel=1e-13
        )

    def test_value_against_oracle(self):
        assert float(lambda_of_beta(1.0, P_HALF)) == pytest.approx(
            ref.LAMBDA_AT_1_ALPHA_HALF, rel=1e-13
        )

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lambda_of_beta(0.0, P_HALF)
        with pytest.raises(ValueError):
            d_lambda(-1.0, P_HALF)

    def test_derivative_sign_structure(self):
        b1 = solve_beta1()
        assert float(d_lambda(b1, P_HALF)) == pytest.approx(0.0, abs=1e-12)
        assert np.all(d_lambda(np.linspace(0.05, b1 - 1e-3, 50), P_HALF) > 0)
        assert np.all(d_lambda(np.linspace(b1 + 1e-3, 40, 50), P_HALF) < 0)

    def test_derivative_matches_finite_difference(self):
        b = np.linspace(0.2, 6.0, 23)
        h = 1e-6
        fd = (lambda_of_beta(b + h, P_HALF) - lambda_of_beta(b - h, P_HALF)) / (2 * h)
        assert np.max(np.abs(fd - d_lambda(b, P_HALF))) < 1e-7

    def test_unimodality_on_fine_grid(self):
        b = np.arange(1e-3, 8.0, 1e-3)
        lam = lambda_of_beta(b, P_HALF)
        diffs = np.sign(np.diff(lam))
        switches = np.nonzero(np.diff(diffs) != 0)[0]
        assert len(switches) == 1
        b1 = solve_beta1()
        assert abs(b[switches[0] + 1] - b1) < 2e-3


class TestEvenSolution:
    @pytest.mark.parametrize("beta", [0.4, 1.0, 3.0])
    def test_plateau_and_boundary(self, beta):
        assert float(u_even(0.0, beta, P_HALF)) == beta
        assert float(u_even(1.0, beta, P_HALF)) == pytest.approx(0.0, abs=1e-13)
        assert float(u_even(-1.0, beta, P_HALF)) == pytest.approx(0.0, abs=1e-13)

    def test_derivative_vanishes_at_alpha(self):
        assert float(u_even_prime(0.5, 2.0, P_HALF)) == 0.0

    def test_c1_gluing(self):
        # value and slope continuous across +-alpha
        beta = 1.7
        for a in (0.2, 0.5, 0.8):
            p = ProblemParams(a)
            eps = 1e-9
            for s in (-1, 1):
                left = float(u_even(s * a - eps, beta, p))
                right = float(u_even(s * a + eps, beta, p))
                assert left == pytest.approx(right, abs=1e-7)
                dl = float(u_even_prime(s * a - eps, beta, p))
                dr = float(u_even_prime(s * a + eps, beta, p))
                # one-sided slopes differ by |u''| * eps across the joint
                curv = float(linearized_potential(a, beta, p))
                assert dl == pytest.approx(dr, abs=10 * curv * eps + 1e-12)

    def test_evenness(self):
        x = np.linspace(0, 1, 101)
        assert np.array_equal(u_even(x, 1.3, P_HALF), u_even(-x, 1.3, P_HALF))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            u_even(1.5, 1.0, P_HALF)

    def test_record_invariants(self):
        sol = EvenSolution(P_HALF, 2.5)
        assert sol.lam == float(lambda_of_beta(2.5, P_HALF))
        assert sol.sup_norm == 2.5
        with pytest.raises(ValueError):
            EvenSolution(P_HALF, -1.0)


class TestPsi:
    def test_plateau_value(self):
        assert float(psi(0.25, 1.0, P_HALF)) == 2.0
        assert float(psi(-0.1, 4.2, P_HALF)) == 2.0

    def test_boundary_values_across_the_fold(self):
        b1 = solve_beta1()
        assert float(psi(1.0, b1, P_HALF)) == pytest.approx(0.0, abs=1e-12)
        assert float(psi(1.0, 2 * b1, P_HALF)) < 0
        assert float(psi(1.0, 0.5 * b1, P_HALF)) > 0

    def test_even(self):
        x = np.linspace(0, 1, 64)
        assert np.array_equal(psi(x, 1.9, P_HALF), psi(-x, 1.9, P_HALF))

    def test_boundary_sign_changes_once(self):
        b1 = solve_beta1()
        b = np.linspace(0.05, 6.0, 400)
        vals = np.array([float(psi(1.0, bb, P_HALF)) for bb in b])
        flips = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        assert len(flips) == 1
        assert b[flips[0]] < b1 < b[flips[0] + 1]

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("beta", [0.5, 1.5, 3.5])
    def test_linearized_ode_residual(self, alpha, beta):
        p = ProblemParams(alpha)
        x = np.linspace(-1, 1, 1001)
        x = x[np.abs(np.abs(x) - alpha) > 1e-9]
        resid = psi_xx(x, beta, p) + linearized_potential(x, beta, p) * psi(x, beta, p)
        assert np.max(np.abs(resid)) < 1e-8


class TestVarphi:
    def test_linear_on_middle(self):
        x = np.linspace(-0.49, 0.49, 33)
        assert np.allclose(varphi(x, 1.2, P_HALF), 2 * x, rtol=0, atol=0)

    def test_continuity_at_alpha(self):
        assert float(varphi(0.5, 1.2, P_HALF)) == pytest.approx(1.0, abs=1e-13)

    def test_odd(self):
        x = np.linspace(0, 1, 200)
        assert np.max(np.abs(varphi(x, 2.3, P_HALF) + varphi(-x, 2.3, P_HALF))) == 0.0

    def test_c1_at_joints(self):
        eps = 1e-9
        for beta in (0.7, 2.0):
            dl = (float(varphi(0.5 + eps, beta, P_HALF)) - float(varphi(0.5 - eps, beta, P_HALF))) / (2 * eps)
            assert dl == pytest.approx(2.0, abs=1e-5)

    def test_root_at_beta2(self):
        b2 = solve_beta2(P_HALF)
        assert float(varphi(1.0, b2, P_HALF)) == pytest.approx(0.0, abs=1e-12)

    def test_boundary_sign_changes_once(self):
        b2 = solve_beta2(P_HALF)
        b = np.linspace(0.05, 8.0, 500)
        vals = np.array([float(varphi(1.0, bb, P_HALF)) for bb in b])
        flips = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        assert len(flips) == 1
        assert b[flips[0]] < b2 < b[flips[0] + 1]

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("beta", [0.5, 1.5, 3.5])
    def test_linearized_ode_residual(self, alpha, beta):
        p = ProblemParams(alpha)
        x = np.linspace(-1, 1, 1001)
        x = x[np.abs(np.abs(x) - alpha) > 1e-9]
        resid = varphi_xx(x, beta, p) + linearized_potential(x, beta, p) * varphi(x, beta, p)
        assert np.max(np.abs(resid)) < 1e-8


class TestG:
    def test_limit_at_zero(self):
        assert float(g_fn(1e-9, P_HALF)) == pytest.approx(2.0, abs=1e-6)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            g_fn(0.0, P_HALF)

    def test_matches_varphi_boundary(self):
        b = np.linspace(0.1, 6.0, 60)
        lhs = g_fn(eta(b) / SQRT2, P_HALF)
        rhs = np.array([float(varphi(1.0, bb, P_HALF)) for bb in b])
        assert np.max(np.abs(lhs - rhs)) < 1e-11

    def test_strictly_decreasing(self):
        x = np.linspace(1e-4, 25, 2000)
        assert np.all(np.diff(g_fn(x, P_HALF)) < 0)

    @pytest.mark.parametrize("x0", [0.5, 1.0, 2.0, 5.0])
    def test_derivative_negative_by_finite_difference(self, x0):
        h = 1e-6
        slope = (float(g_fn(x0 + h, P_HALF)) - float(g_fn(x0 - h, P_HALF))) / (2 * h)
        assert slope < 0

    def test_tanh_inequality_used_in_monotonicity(self):
        # tanh x > x (1 - tanh^2 x) on (0, 20]
        x = np.linspace(1e-6, 20, 4000)
        t = np.tanh(x)
        assert np.all(t > x * (1 - t * t))


class TestLinearizedPotential:
    def test_zero_inside(self):
        assert float(linearized_potential(0.0, 1.0, P_HALF)) == 0.0

    def test_peak_at_alpha(self):
        beta = 1.4
        want = float(lambda_of_beta(beta, P_HALF)) * math.exp(beta)
        assert float(linearized_potential(0.5, beta, P_HALF)) == pytest.approx(want, rel=1e-13)

    @pytest.mark.parametrize("beta", [0.3, 1.0, 2.7])
    def test_simplified_form_matches_composition(self, beta):
        x = np.linspace(-1, 1, 801)
        direct = lambda_of_beta(beta, P_HALF) * P_HALF.weight(x) * np.exp(u_even(x, beta, P_HALF))
        assert np.max(np.abs(direct - linearized_potential(x, beta, P_HALF))) < 1e-12

    def test_even(self):
        x = np.linspace(0, 1, 100)
        assert np.array_equal(
            linearized_potential(x, 2.0, P_HALF), linearized_potential(-x, 2.0, P_HALF)
        )


def test_c1_matches_both_closed_forms():
    # -2/(e^b Lambda) - a^2 and -2(1-a)^2/eta^2 - a^2 agree
    for beta in (0.5, 1.5, 4.0):
        via_lambda = -2.0 / (math.exp(beta) * float(lambda_of_beta(beta, P_HALF))) - 0.25
        assert c1(beta, P_HALF) == pytest.approx(via_lambda, rel=1e-12)
