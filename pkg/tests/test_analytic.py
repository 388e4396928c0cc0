import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from rechargetime.analytic import (
    AsymptoticMoments,
    TruncationWarning,
    nonlinear_cdf,
    poisson_cdf_exp_exact,
    poisson_cdf_normal,
    poisson_mean_tau,
    renewal_cdf_clt,
    renewal_mean_tau,
    renewal_var_tau,
)
from rechargetime.battery import LinearBattery, NonLinearBattery
from rechargetime.distributions import Deterministic, Exponential, Gamma, Uniform
from rechargetime.renewal import ArrivalProcess, Mode


def exp_exp_moments():
    return AsymptoticMoments.from_specs(ArrivalProcess(Exponential(1.0)), Exponential(1.0))


def erlang_double_sum_cdf(u, t, lam, xbar, n_max):
    """Independent re-derivation via the raw double sum (no gamma functions):

    P = e^{-(lam t + u/xbar)} sum_{n>=1} (lam t)^n / n! * sum_{i<n} (u/xbar)^i / i!

    Plain floating arithmetic, so valid for small n_max only.
    """
    total = 0.0
    for n in range(1, n_max + 1):
        w = (lam * t) ** n / math.factorial(n)
        inner = sum((u / xbar) ** i / math.factorial(i) for i in range(n))
        total += w * inner
    return math.exp(-(lam * t + u / xbar)) * total


class TestPoissonNormalSeries:
    def test_zero_time(self):
        assert poisson_cdf_normal(20.0, 0.0, 1.0, 1.0, 1.0) == 0.0

    def test_large_time_limit(self):
        assert poisson_cdf_normal(20.0, 100.0, 1.0, 1.0, 1.0, n_max=300) == pytest.approx(1.0, abs=1e-6)

    def test_matches_exact_for_exponential_packets(self):
        # the normal approximation should track the exact formula
        for t in (5.0, 15.0, 20.0, 30.0):
            approx = poisson_cdf_normal(20.0, t, 1.0, 1.0, 1.0, n_max=200)
            exact = poisson_cdf_exp_exact(20.0, t, 1.0, 1.0)
            assert abs(approx - exact) < 0.015

    def test_deterministic_packets_use_indicator(self):
        # with sigma = 0 the n-fold sum is a step: P = P(Poisson(t) > u/c)
        u, c, t = 20.0, 3.0, 10.0
        need = math.floor(u / c) + 1  # arrivals needed to strictly exceed u
        expected = float(special.gammainc(need, t))  # P(N >= need)
        assert poisson_cdf_normal(u, t, 1.0, c, 0.0) == pytest.approx(expected, abs=1e-12)

    def test_log_space_survives_large_lambda_t(self):
        val = poisson_cdf_normal(20.0, 500.0, 1.0, 1.0, 1.0, n_max=700)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            poisson_cdf_normal(20.0, 300.0, 1.0, 1.0, 1.0, n_max=100)

    def test_monotone_in_time(self):
        vals = [poisson_cdf_normal(20.0, t, 1.0, 0.5, 0.3, 200) for t in np.linspace(0, 80, 200)]
        assert np.all(np.diff(vals) >= -1e-12)


class TestPoissonExactSeries:
    def test_q1_is_exp(self):
        for x in (0.1, 1.0, 5.0):
            assert special.gammaincc(1.0, x) == pytest.approx(math.exp(-x), rel=1e-13)

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 20.0, 100.0])
    def test_truncated_exponential_sum_identity(self, x):
        # sum_{i<n} x^i/i! == e^x * Q(n, x)
        for n in range(1, 51):
            lhs = sum(x**i / math.factorial(i) for i in range(n))
            rhs = math.exp(x) * special.gammaincc(n, x)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, lhs)

    def test_against_independent_erlang_series(self):
        # dual-route check of the same algebra, small n so naive floats are fine
        for u in (2.0, 5.0):
            for t in (1.0, 4.0, 8.0):
                exact = poisson_cdf_exp_exact(u, t, 1.0, 1.0, n_max=30)
                oracle = erlang_double_sum_cdf(u, t, 1.0, 1.0, 30)
                assert exact == pytest.approx(oracle, abs=1e-10)

    def test_zero_time(self):
        assert poisson_cdf_exp_exact(20.0, 0.0, 1.0, 1.0) == 0.0

    def test_stochastic_ordering_in_threshold(self):
        for t in np.linspace(0.5, 60, 40):
            p5 = poisson_cdf_exp_exact(5.0, t, 1.0, 1.0)
            p10 = poisson_cdf_exp_exact(10.0, t, 1.0, 1.0)
            p20 = poisson_cdf_exp_exact(20.0, t, 1.0, 1.0)
            assert p5 >= p10 >= p20


class TestPoissonMean:
    def test_tiny_threshold_is_one_arrival(self):
        # sigma_X well below Xbar so the n >= 1 normal terms vanish at u -> 0
        assert poisson_mean_tau(1e-6, 2.0, 1.0, 0.2) == pytest.approx(0.5, rel=1e-4)

    def test_rate_scaling(self):
        m1 = poisson_mean_tau(20.0, 1.0, 1.0, 1.0)
        m2 = poisson_mean_tau(20.0, 2.0, 1.0, 1.0)
        assert m2 == pytest.approx(m1 / 2.0, rel=1e-12)

    @pytest.mark.parametrize("u", [5.0, 10.0, 20.0])
    def test_mean_consistency_with_exact_cdf_quadrature(self, u):
        # E[tau] = int_0^inf (1 - P(tau <= t)) dt on the exact formula
        m_quad = quad(lambda t: 1.0 - poisson_cdf_exp_exact(u, t, 1.0, 1.0), 0, 60 + 10 * u, limit=400)[0]
        m_series = poisson_mean_tau(u, 1.0, 1.0, 1.0)
        assert abs(m_series - m_quad) / m_quad < 0.01

    def test_deterministic_packets(self):
        # ceil-counting: E[tau] = (1 + floor(u/c)) / lam
        assert poisson_mean_tau(20.0, 1.0, 3.0, 0.0) == pytest.approx(7.0)


class TestRenewalAsymptotics:
    def test_exp_exp_mean_21(self):
        m = exp_exp_moments()
        assert m.gamma2 == pytest.approx(2.0)
        assert renewal_mean_tau(20.0, m) == pytest.approx(21.0)

    def test_exp_exp_var_41(self):
        assert renewal_var_tau(20.0, exp_exp_moments()) == pytest.approx(41.0)

    def test_deterministic_laws_have_zero_gamma2(self):
        m = AsymptoticMoments.from_specs(ArrivalProcess(Deterministic(2.0)), Deterministic(3.0))
        assert m.gamma2 == 0.0
        assert renewal_mean_tau(20.0, m) == pytest.approx(20.0 / (0.5 * 3.0))
        # only residual jitter remains: A0 ~ Uniform(0, 2)
        assert renewal_var_tau(20.0, m) == pytest.approx(4.0 / 12.0)

    def test_mean_linear_in_threshold(self):
        m = AsymptoticMoments.from_specs(ArrivalProcess(Gamma(1.5, 2.0)), Uniform(0.0, 1.0))
        delta = renewal_mean_tau(40.0, m) - renewal_mean_tau(20.0, m)
        assert delta == pytest.approx(20.0 / (m.lam * m.Xbar))

    def test_pure_mode_deterministic_variance_zero(self):
        m = AsymptoticMoments.from_specs(
            ArrivalProcess(Deterministic(2.0), Mode.PURE), Deterministic(3.0)
        )
        assert renewal_var_tau(20.0, m) == 0.0


class TestRenewalClt:
    def test_plain_mode_centered(self):
        m = exp_exp_moments()
        assert renewal_cdf_clt(20.0, 20.0, m, refined=False) == pytest.approx(0.5)

    def test_monotone_in_time(self):
        m = AsymptoticMoments.from_specs(ArrivalProcess(Gamma(1.0, 2.0)), Exponential(1.0))
        vals = [renewal_cdf_clt(20.0, t, m) for t in np.linspace(0, 150, 300)]
        assert np.all(np.diff(vals) >= 0)

    def test_degenerate_step(self):
        m = AsymptoticMoments.from_specs(
            ArrivalProcess(Deterministic(1.0), Mode.PURE), Deterministic(3.0)
        )
        assert renewal_cdf_clt(20.0, 6.0, m) == 0.0
        assert renewal_cdf_clt(20.0, 7.0, m) == 1.0


class TestNonlinearCdf:
    def test_linear_model_is_identity(self):
        fn = lambda u, t: poisson_cdf_exp_exact(u, t, 1.0, 1.0)
        for t in (5.0, 20.0, 30.0):
            assert nonlinear_cdf(20.0, t, LinearBattery(umax=25.0), fn) == fn(20.0, t)

    def test_uses_shifted_threshold(self):
        bat = NonLinearBattery(25.0, 1.1)
        fn = lambda u, t: poisson_cdf_exp_exact(u, t, 1.0, 1.0)
        up = bat.input_for_level(20.0)
        assert up == pytest.approx(29.34, abs=0.01)
        for t in (20.0, 30.0, 40.0):
            assert nonlinear_cdf(20.0, t, bat, fn) == fn(up, t)

    def test_huge_beta_approaches_linear(self):
        bat = NonLinearBattery(25.0, 1e6)
        fn = lambda u, t: poisson_cdf_exp_exact(u, t, 1.0, 1.0)
        for t in (10.0, 20.0, 30.0):
            assert abs(nonlinear_cdf(20.0, t, bat, fn) - fn(20.0, t)) < 1e-3

    def test_propagates_domain_error(self):
        bat = NonLinearBattery(25.0, 1.1)
        with pytest.raises(ValueError):
            nonlinear_cdf(26.0, 5.0, bat, lambda u, t: 0.0)


class TestCdfRangeProperties:
    def test_all_formulas_in_unit_interval(self):
        m = exp_exp_moments()
        for t in np.linspace(0.0, 100.0, 101):
            for v in (
                poisson_cdf_normal(20.0, t, 1.0, 1.0, 1.0, 200),
                poisson_cdf_exp_exact(20.0, t, 1.0, 1.0),
                renewal_cdf_clt(20.0, t, m),
            ):
                assert 0.0 <= v <= 1.0

    def test_zero_at_origin(self):
        m = exp_exp_moments()
        assert poisson_cdf_normal(20.0, 0.0, 1.0, 1.0, 1.0) == 0.0
        assert poisson_cdf_exp_exact(20.0, 0.0, 1.0, 1.0) == 0.0
        assert renewal_cdf_clt(20.0, 0.0, m) < 1e-3
