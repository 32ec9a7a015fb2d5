import math
import warnings

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnp_extremes.binom import normal_tail
from gnp_extremes.bounds import (
    LowVarianceWarning,
    ModelParams,
    bound_report,
    cov_asymptotic,
    cov_exact,
    cramer_gap,
    cramer_threshold,
    degree_ge_threshold,
    exceedance_prob,
    limit_cdf,
    moment_bounds,
    normalization,
    pi1,
    poisson_cdf,
    poisson_pmf,
    poisson_sf,
    thresholds,
    utvd_asymptotic,
    utvd_exact,
    utvd_exact_at,
)
from gnp_extremes.errors import DomainError


def _params_at(n, p, y):
    """ModelParams whose threshold is exactly the raw value ``y``."""
    a_n, b_n = normalization(n)
    x = (y - (n - 1) * p) / math.sqrt((n - 1) * p * (1 - p))
    return ModelParams(n, p, (x - b_n) / a_n)


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [dict(n=2, p=0.5), dict(n=10, p=0.0), dict(n=10, p=1.0),
                                        dict(n=10, p=0.5, m=0), dict(n=10, p=0.5, m=11),
                                        dict(n=10, p=0.5, t=math.inf)])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            ModelParams(**kwargs)

    def test_schedule(self):
        params = ModelParams.with_schedule(10_000, lambda n: n ** -0.25)
        assert params.p == pytest.approx(0.1)
        assert params.npq == pytest.approx(900.0)
        assert not params.low_variance


class TestNormalization:
    def test_n100(self):
        with mp.workdps(40):
            L = 2 * mp.log(100)
            a = 1 / mp.sqrt(L)
            b = mp.sqrt(L) - (mp.log(mp.log(100)) + mp.log(4 * mp.pi)) / (2 * mp.sqrt(L))
        a_n, b_n = normalization(100)
        assert abs(a_n - float(a)) < 1e-10 and abs(b_n - float(b)) < 1e-10
        # published five-digit figures; the last digit of b_n is off by one
        assert a_n == pytest.approx(0.32951, abs=2e-5)
        assert b_n == pytest.approx(2.36624, abs=2e-5)

    def test_identity(self):
        for n in (3, 10, 10**6):
            a_n, _ = normalization(n)
            assert a_n * math.sqrt(2 * math.log(n)) == pytest.approx(1.0, rel=1e-15)

    def test_small_n(self):
        a_n, b_n = normalization(3)
        assert a_n > 0 and math.isfinite(b_n)
        with pytest.raises(DomainError):
            normalization(2)


class TestThresholds:
    def test_t0(self):
        th = thresholds(ModelParams(100, 0.5, 0.0))
        assert th.x_n == th.b_n
        assert th.y == pytest.approx(49.5 + th.b_n * math.sqrt(24.75), rel=1e-15)

    def test_monotone_in_t(self):
        assert thresholds(ModelParams(100, 0.5, 1.0)).y > thresholds(ModelParams(100, 0.5, 0.0)).y

    def test_centering_variant(self):
        th = thresholds(ModelParams(100, 0.5, 0.0), centering="n")
        assert th.y == pytest.approx(50 + th.b_n * 5.0, rel=1e-15)
        with pytest.raises(DomainError):
            thresholds(ModelParams(100, 0.5), centering="bogus")

    @settings(max_examples=50, deadline=None)
    @given(st.integers(3, 10**7), st.floats(-5, 5))
    def test_level_positive(self, n, t):
        th = thresholds(ModelParams(n, 0.5, t))
        assert th.a_n > 0
        if n >= 20:
            assert th.x_n > 0


class TestPi1:
    def test_n3(self):
        assert pi1(_params_at(3, 0.5, 1.5)) == pytest.approx(0.25, abs=1e-15)

    def test_assertion_two_scale(self):
        assert abs(pi1(ModelParams(10**6, 0.5, 0.0)) * 10**6 - 1) < 0.3

    def test_decreasing_in_t(self):
        values = [pi1(ModelParams(5000, 0.3, t)) for t in (-2, -1, 0, 1, 2)]
        assert all(b <= a for a, b in zip(values, values[1:]))


class TestCovariance:
    def test_n3(self):
        assert cov_exact(3, 0.5, 1.5) == pytest.approx(0.0625, abs=1e-16)

    def test_below_support(self):
        assert cov_exact(10, 0.5, -1.5) == 0.0

    def test_matches_difference_of_tails(self):
        from gnp_extremes.binom import BinomialSpec, binom_tail
        for n, p, y in [(50, 0.3, 12.5), (50, 0.3, 12.0), (7, 0.5, 3.0), (400, 0.8, 330.2)]:
            spec = BinomialSpec(n - 2, p)
            diff = binom_tail(spec, y - 1) - binom_tail(spec, y)
            assert cov_exact(n, p, y) == pytest.approx(p * (1 - p) * diff * diff, rel=1e-10)

    def test_asymptotic_form(self):
        params = ModelParams(1000, 0.5, 0.0)
        assert cov_asymptotic(params) == pytest.approx(2 * math.log(1000) / 1e9, rel=1e-15)
        ratio = cov_asymptotic(ModelParams(1000, 0.5, 1.0)) / cov_asymptotic(params)
        assert ratio == pytest.approx(math.exp(-2), rel=1e-14)

    def test_ratio_trend(self):
        def ratio(n):
            params = ModelParams(n, 0.5, 0.0)
            return cov_exact(n, 0.5, thresholds(params).y) / cov_asymptotic(params)
        r3, r6 = ratio(10**3), ratio(10**6)
        assert 0.5 <= r6 <= 2.0
        assert abs(r6 - 1) < abs(r3 - 1)


class TestUtvd:
    def test_n3(self):
        assert utvd_exact(_params_at(3, 0.5, 1.5)) == pytest.approx(0.395725, abs=5e-6)
        expected = -math.expm1(-0.75) * (0.25 + 6 * 0.0625 / 0.75)
        assert utvd_exact_at(3, 0.5, 1.5)[0] == pytest.approx(expected, rel=1e-14)

    def test_vanishes_for_large_t(self):
        values = [utvd_exact(ModelParams(1000, 0.5, t)) for t in (0, 5, 20, 80)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-12

    def test_degenerate(self):
        bound, degenerate = utvd_exact_at(1000, 0.5, 999.5)
        assert (bound, degenerate) == (0.0, True)
        bound, degenerate = utvd_exact_at(10**6, 0.5, 9e5)
        assert (bound, degenerate) == (0.0, True)

    def test_asymptotic_value(self):
        value = utvd_asymptotic(ModelParams(1000, 0.5, 0.0))
        assert value == pytest.approx((1 + 2 * math.log(1000)) / 1000 * (1 - math.exp(-1)), rel=1e-14)
        assert value == pytest.approx(0.00936, abs=1e-5)

    def test_asymptotic_positive_and_decreasing(self):
        for t in (-2, 0, 2):
            for n in (10, 100, 10**4):
                a = utvd_asymptotic(ModelParams(n, 0.5, t))
                b = utvd_asymptotic(ModelParams(2 * n, 0.5, t))
                assert 0 < b < a

    def test_report(self):
        with pytest.warns(LowVarianceWarning):
            report = bound_report(ModelParams(50, 0.5, 0.0))
        assert report.low_variance
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            report = bound_report(ModelParams(1000, 0.5, 0.0))
        assert report.lam == 1000 * report.pi1
        assert report.cov_exact >= 0 and report.utvd_exact >= 0
        row = report.as_row()
        assert row["utvd_ratio"] == pytest.approx(report.utvd_exact / report.utvd_asym)
        assert row["n_pi1_et"] == report.lam


class TestPoisson:
    def test_values(self):
        assert poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1), rel=1e-15)
        assert poisson_pmf(0.0, 0) == 1.0
        assert poisson_pmf(0.0, 3) == 0.0
        for k in range(4):
            exact = mp.exp(-mp.mpf(0.75)) * mp.mpf(0.75) ** k / mp.factorial(k)
            assert poisson_pmf(0.75, k) == pytest.approx(float(exact), rel=1e-14)
        # five-digit reference table (0.35427 is printed as 0.35428)
        for k, value in enumerate([0.47237, 0.35428, 0.13285, 0.03321]):
            assert poisson_pmf(0.75, k) == pytest.approx(value, abs=2e-5)

    def test_cdf_plus_tail(self):
        for lam in (0.01, 0.75, 3.0, 40.0):
            for k in (0, 1, 5, 60):
                assert poisson_cdf(lam, k) + poisson_sf(lam, k) == pytest.approx(1.0, abs=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            poisson_pmf(-1.0, 0)


class TestLimitCdf:
    def test_values(self):
        assert limit_cdf(1, 0.0) == pytest.approx(math.exp(-1), rel=1e-15)
        assert limit_cdf(2, 0.0) == pytest.approx(2 * math.exp(-1), rel=1e-15)
        assert limit_cdf(3, 50.0) == pytest.approx(1.0, abs=1e-15)
        assert limit_cdf(1, -50.0) == 0.0

    def test_gumbel(self):
        for t in (-2, -0.3, 0.7, 4):
            assert limit_cdf(1, t) == pytest.approx(math.exp(-math.exp(-t)), rel=1e-14)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 6), st.floats(-8, 8), st.floats(0, 3))
    def test_is_cdf_family(self, m, t, dt):
        assert 0 <= limit_cdf(m, t) <= limit_cdf(m, t + dt) <= 1
        assert limit_cdf(m + 1, t) >= limit_cdf(m, t)

    def test_domain(self):
        with pytest.raises(DomainError):
            limit_cdf(0, 0.0)


class TestCramer:
    @pytest.mark.parametrize("n", [3, 100, 10**3, 10**6, 10**12])
    @pytest.mark.parametrize("c", [math.exp(-2), 1.0, math.e])
    def test_residual(self, n, c):
        try:
            x = cramer_threshold(n, c)
        except DomainError:
            assert n * math.exp(-0.5) / math.sqrt(2 * math.pi) < c
            return
        assert x >= 1
        value = n * math.exp(-0.5 * x * x) / (math.sqrt(2 * math.pi) * x)
        assert abs(value - c) <= 1e-12 * c

    def test_monotone_in_c(self):
        assert cramer_threshold(10**4, math.exp(-1)) > cramer_threshold(10**4, math.e)

    def test_gap_large_n(self):
        assert cramer_gap(10**6, 0.0) < 0.05

    def test_domain(self):
        with pytest.raises(DomainError):
            cramer_threshold(10, -1.0)
        with pytest.raises(DomainError):
            cramer_threshold(3, 5.0)


class TestMomentBounds:
    def test_n3(self):
        lower, upper = moment_bounds(3, 0.5, 1, 2)
        assert lower == pytest.approx(0.75, abs=1e-15)
        assert upper == pytest.approx(3.0, abs=1e-15)

    def test_ordering_at_r_max(self):
        for n in (3, 6, 40):
            lower, upper = moment_bounds(n, 0.4, n - 1, n / 2)
            assert math.isfinite(lower) and lower <= upper

    def test_domain(self):
        with pytest.raises(DomainError):
            moment_bounds(5, 0.5, 5, 2)
        with pytest.raises(DomainError):
            moment_bounds(5, 0.5, 0, 2)

    def test_ge_threshold(self):
        assert degree_ge_threshold(2) == 1.5
        assert degree_ge_threshold(2.5) == 2.5
        assert exceedance_prob(3, 0.5, degree_ge_threshold(2)) == 0.25


class TestRateInvariants:
    NS = (10**3, 10**4, 10**5, 10**6)

    def test_rate_invariant_band(self):
        values = []
        for n in self.NS:
            report = bound_report(ModelParams(n, 0.5, 0.0), warn=False)
            values.append(report.utvd_exact * n
                          / (2 * math.log(n) * -math.expm1(-report.lam)))
        assert 0.5 <= max(values) <= 1.5

    @pytest.mark.parametrize("t", [-1.0, 1.0])
    def test_expected_count_trend(self, t):
        dev = [abs(n * pi1(ModelParams(n, 0.5, t)) * math.exp(t) - 1) for n in (10**3, 10**6)]
        assert dev[1] < dev[0]

    def test_mills_trend(self):
        def dev(n):
            params = ModelParams(n, 0.5, 0.0)
            return abs(pi1(params) / normal_tail(thresholds(params).x_n) - 1)
        assert dev(10**6) < dev(10**3)
