import math

import numpy as np
import pytest

from anisoblow.errors import SignChangeError, WindowError
from anisoblow.exponents import SupercriticalParams, derive_params
from anisoblow.radial import RadialProfile, log_uniform_grid
from anisoblow.soliton import (R_TAYLOR, SolitonBundle, fit_tail, lambda_r,
                               rescale_Qb, solve_soliton, tail_bound_report,
                               tail_free_slope, taylor_series)


@pytest.fixture(scope="module")
def prm():
    return derive_params(15, 3, 3)


@pytest.fixture(scope="module")
def bundle(prm):
    return solve_soliton(prm)


def rk4_oracle(d, p, r_end, n_steps, r_start=0.01):
    """Independent fixed-step classical RK4 integration of the soliton ODE.

    Starts at r_start (series error there ~ r^8, far below the RK4 error);
    n_steps must keep h*(d-1)/r_start inside the RK4 stability region.
    """

    def f(r, y):
        return np.array([y[1], -(d - 1.0) / r * y[1] - y[0] ** p])

    q0, dq0 = taylor_series(r_start, d, p)
    y = np.array([q0, dq0])
    r = r_start
    h = (r_end - r_start) / n_steps
    for _ in range(n_steps):
        k1 = f(r, y)
        k2 = f(r + h / 2, y + h / 2 * k1)
        k3 = f(r + h / 2, y + h / 2 * k2)
        k4 = f(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r += h
    return y


class TestSolve:
    def test_origin_values(self, bundle, prm):
        assert bundle.Q.r[0] == 0.0
        assert bundle.Q.val[0] == 1.0
        assert bundle.Q.dval[0] == 0.0
        # Q''(0) = -1/d from the series: 2 q2 d = -1
        r = 1e-4
        q, dq = taylor_series(r, prm.d, prm.p)
        assert dq / r == pytest.approx(-1.0 / prm.d, rel=1e-6)

    def test_lambda_at_origin(self, bundle, prm):
        assert bundle.LambdaQ.val[0] == pytest.approx(2.0 / (prm.p - 1.0), abs=1e-14)

    def test_against_rk4_oracle(self, prm, bundle):
        # independent integrator; coarse enough that truncation beats the
        # roundoff floor, start clear of the (d-1)/r stiffness
        coarse = rk4_oracle(prm.d, prm.p, 10.0, 250, r_start=0.2)[0]
        mid = rk4_oracle(prm.d, prm.p, 10.0, 500, r_start=0.2)[0]
        fine = rk4_oracle(prm.d, prm.p, 10.0, 1000, r_start=0.2)[0]
        order = math.log2(abs(coarse - mid) / abs(mid - fine))
        assert order > 3.5  # classical RK4
        extrap = fine + (fine - mid) / 15.0
        ours = bundle.eval_Q(np.array([10.0]))[0]
        assert ours == pytest.approx(extrap, rel=5e-8)

    def test_ode_residual_small(self, bundle):
        assert bundle.ode_residual() < 1e-7

    def test_tolerance_scaling(self, prm):
        # halving tol must not increase the deviation from a tight reference
        ref = solve_soliton(prm, tol=1e-12)
        probe = np.array([1.0, 5.0, 50.0])
        errs = []
        for tol in (1e-6, 1e-8, 1e-10):
            b = solve_soliton(prm, tol=tol)
            errs.append(np.max(np.abs(b.eval_Q(probe) - ref.eval_Q(probe))))
        assert errs[2] < errs[0]
        assert errs[2] < 1e-9

    def test_sign_change_detected(self):
        # subcritical toy configuration: ground state crosses zero
        prm = SupercriticalParams(d=5, p=2.0, ell=1, c_inf=1.0, gamma=1.0,
                                  gamma2=2.0, Delta=1.0, alpha=0.5,
                                  epsilon_g=0.01, g=0.5)
        with pytest.raises(SignChangeError):
            solve_soliton(prm, r_max=1e3)

    def test_preconditions(self, prm):
        with pytest.raises(ValueError):
            solve_soliton(prm, r_max=50.0)
        with pytest.raises(ValueError):
            solve_soliton(prm, tol=1e-3)


class TestTail:
    def test_fitted_constant_positive(self, bundle):
        assert bundle.tail_c > 0

    def test_free_slope_matches_gamma(self, bundle, prm):
        slope = tail_free_slope(bundle)
        assert abs(-slope - prm.gamma) / prm.gamma < 0.01

    def test_lambda_tail_coefficient(self, bundle, prm):
        # Lambda Q ~ c' r^-gamma with c' = alpha * c (Lambda Phi* = 0,
        # Lambda r^-gamma = -alpha r^-gamma)
        assert bundle.lambda_tail_c != 0.0
        assert bundle.lambda_tail_c == pytest.approx(prm.alpha * bundle.tail_c,
                                                     rel=2e-3)

    def test_residual_decreasing_on_window(self, bundle, prm):
        r = bundle.Q.r
        m = (r >= 50.0) & (r <= 500.0)
        resid = np.abs(r[m] ** prm.gamma * bundle.LambdaQ.val[m]
                       - bundle.lambda_tail_c)
        n = len(resid)
        assert resid[: n // 4].mean() > resid[-n // 4:].mean()

    def test_window_errors(self, bundle):
        with pytest.raises(WindowError):
            fit_tail(bundle, (5.0, 500.0))
        with pytest.raises(WindowError):
            fit_tail(bundle, (50.0, bundle.r_max))


class TestRescale:
    def test_identity_at_b1(self, bundle):
        qb = rescale_Qb(bundle, 1.0)
        r = np.array([0.0, 0.3, 2.0, 40.0])
        assert qb(r) == pytest.approx(bundle.eval_Q(r), rel=1e-12)

    def test_origin_value(self, bundle, prm):
        b = 1e-3
        qb = rescale_Qb(bundle, b)
        assert qb(np.array([0.0]))[0] == pytest.approx(
            b ** (-1.0 / (prm.p - 1.0)), rel=1e-12)

    def test_sup_at_origin(self, bundle):
        # monotonicity oracle: Q' < 0 for r > 0 on the solved grid
        assert np.all(bundle.Q.dval[1:] < 0)
        qb = rescale_Qb(bundle, 1e-2)
        r = np.linspace(0.0, 10.0, 500)
        vals = qb(r)
        assert np.argmax(vals) == 0

    def test_tail_extension_continuous(self, bundle):
        # probe offsets small enough that the smooth variation (~2e-6
        # relative) dominates any branch mismatch at the spline/tail junction
        b = 4.0  # pushes r/sqrt(b) past r_max for moderate r
        qb = rescale_Qb(bundle, b)
        r_edge = bundle.r_max * math.sqrt(b)
        lo, hi = qb(np.array([r_edge * (1 - 1e-6), r_edge * (1 + 1e-6)]))
        assert abs(lo - hi) / abs(lo) < 5e-6

    def test_invalid_b(self, bundle):
        with pytest.raises(ValueError):
            rescale_Qb(bundle, 0.0)


class TestLambdaR:
    def test_annihilates_phi_star(self, bundle, prm):
        r = log_uniform_grid(0.1, 10.0, 1024)
        prof = RadialProfile(r, prm.phi_star(r), prm.dphi_star(r))
        out = lambda_r(prof, prm)
        assert np.max(np.abs(out.val)) < 1e-10 * np.max(np.abs(prof.val))

    def test_power_law_eigenfunction(self, prm):
        # Lambda_r r^-gamma = (2/(p-1) - gamma) r^-gamma = -alpha r^-gamma
        r = log_uniform_grid(0.1, 10.0, 1024)
        prof = RadialProfile(r, r ** -prm.gamma,
                             -prm.gamma * r ** (-prm.gamma - 1.0))
        out = lambda_r(prof, prm)
        assert out.val == pytest.approx(-prm.alpha * r ** -prm.gamma, rel=1e-10)

    def test_matches_bundle_lambda(self, bundle, prm):
        # restrict to r <= 100: beyond, m Q + r Q' cancels to ~ r^-alpha Q and
        # the roundoff of the cancellation dominates any relative comparison
        out = lambda_r(bundle.Q, prm)
        m = bundle.Q.r <= 100.0
        assert out.val[m] == pytest.approx(bundle.LambdaQ.val[m], rel=1e-8)
        body = (bundle.Q.r >= 2e-3) & (bundle.Q.r <= 100.0)
        assert out.dval[body] == pytest.approx(bundle.LambdaQ.dval[body],
                                               rel=1e-4, abs=1e-8)


class TestGlobalBounds:
    def test_all_pointwise_bounds(self, bundle):
        report = tail_bound_report(bundle)
        assert report["all"], report

    def test_derivative_consistency_invariant(self, bundle):
        assert bundle.Q.derivative_consistency() < 1e-5
