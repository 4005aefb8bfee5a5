import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpcredit import (At1pParams, DiscountCurve, DomainError, HazardCurve,
                      SbtvParams, VolatilityTermStructure, at1p_survival,
                      barrier_level, intensity_survival, sbtv_survival)

LEHMAN_2007_VOLS = VolatilityTermStructure(
    bucket_ends=(1.0, 3.0, 5.0, 7.0, 10.0),
    sigmas=(0.292, 0.140, 0.145, 0.120, 0.127))


def flat_vols(sigma, end=30.0):
    return VolatilityTermStructure(bucket_ends=(end,), sigmas=(sigma,))


class TestVolatilityTermStructure:
    def test_cumulative_variance_additive_across_buckets(self):
        vols = LEHMAN_2007_VOLS
        ends = np.concatenate(([0.0], np.array(vols.bucket_ends)))
        total = np.sum(np.array(vols.sigmas) ** 2 * np.diff(ends))
        assert vols.cumulative_variance(vols.bucket_ends[-1]) == total

    def test_flat_extension_beyond_last_bucket(self):
        vols = LEHMAN_2007_VOLS
        cv10 = vols.cumulative_variance(10.0)
        assert vols.cumulative_variance(12.0) == pytest.approx(
            cv10 + 0.127 ** 2 * 2.0, rel=1e-14)

    def test_zero_at_origin_and_increasing(self):
        vols = LEHMAN_2007_VOLS
        ts = np.linspace(0.0, 15.0, 200)
        cv = vols.cumulative_variance(ts)
        assert cv[0] == 0.0
        assert np.all(np.diff(cv) > 0)

    def test_validation(self):
        with pytest.raises(DomainError):
            VolatilityTermStructure(bucket_ends=(1.0, 1.0), sigmas=(0.2, 0.2))
        with pytest.raises(DomainError):
            VolatilityTermStructure(bucket_ends=(1.0,), sigmas=(0.0,))


class TestAt1pSurvival:
    def test_2007_one_year_value(self):
        params = At1pParams(h_over_v0=0.4, b=0.0, vols=LEHMAN_2007_VOLS)
        assert at1p_survival(params, 1.0) == pytest.approx(0.997, abs=1e-3)

    def test_survival_one_at_time_zero(self):
        params = At1pParams(h_over_v0=0.4, b=0.0, vols=LEHMAN_2007_VOLS)
        assert at1p_survival(params, 0.0) == 1.0

    def test_vanishing_volatility_limit(self):
        params = At1pParams(h_over_v0=0.4, b=0.0, vols=flat_vols(1e-8))
        assert at1p_survival(params, 5.0) == pytest.approx(1.0, abs=1e-12)

    def test_huge_volatility_limit(self):
        params = At1pParams(h_over_v0=0.4, b=0.0, vols=flat_vols(4.9))
        q = at1p_survival(params, 30.0)
        assert 0.0 <= q < 1e-6

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            At1pParams(h_over_v0=1.0, b=0.0, vols=flat_vols(0.2))
        params = At1pParams(h_over_v0=0.4, b=0.0, vols=flat_vols(0.2))
        with pytest.raises(DomainError):
            at1p_survival(params, -1.0)

    def test_against_first_passage_monte_carlo(self):
        # independent oracle: exact Brownian steps for log(V/H(t)) plus the
        # analytic bridge-crossing probability per step, so the first-passage
        # law is sampled exactly even on a coarse grid
        h, sigma, T, n_steps, n_paths = 0.4, 0.20, 5.0, 5, 400_000
        rng = np.random.default_rng(20240401)
        dt = T / n_steps
        dvar = sigma ** 2 * dt
        x = np.full(n_paths, -math.log(h))
        alive = np.ones(n_paths, dtype=bool)
        for _ in range(n_steps):
            z = rng.standard_normal(n_paths)
            x_new = x - 0.5 * dvar + math.sqrt(dvar) * z
            hit = alive & (x_new <= 0)
            bridge = alive & ~hit
            p_cross = np.exp(-2.0 * x[bridge] * x_new[bridge] / dvar)
            hit_mid = np.zeros(n_paths, dtype=bool)
            hit_mid[bridge] = rng.random(bridge.sum()) < p_cross
            alive &= ~hit & ~hit_mid
            x = x_new
        q_mc = alive.mean()
        params = At1pParams(h_over_v0=h, b=0.0, vols=flat_vols(sigma))
        q_cf = at1p_survival(params, T)
        se = math.sqrt(q_cf * (1 - q_cf) / n_paths)
        assert abs(q_mc - q_cf) < 3 * se

    @given(h=st.floats(0.05, 0.95), t=st.floats(0.01, 20.0))
    @settings(max_examples=60)
    def test_bounds_and_monotone_in_time(self, h, t):
        params = At1pParams(h_over_v0=h, b=0.0, vols=flat_vols(0.25))
        q1, q2 = at1p_survival(params, t), at1p_survival(params, t * 1.5)
        assert 0.0 <= q2 <= q1 <= 1.0

    @given(h1=st.floats(0.05, 0.9), bump=st.floats(0.01, 0.09), t=st.floats(0.1, 10.0))
    @settings(max_examples=60)
    def test_strictly_decreasing_in_barrier(self, h1, bump, t):
        vols = flat_vols(0.25)
        qa = at1p_survival(At1pParams(h1, 0.0, vols), t)
        qb = at1p_survival(At1pParams(h1 + bump, 0.0, vols), t)
        assert qb <= qa
        # strictness can only be lost where both saturate at 1 in doubles
        if qa < 1.0 - 1e-12:
            assert qb < qa

    @given(h=st.floats(0.05, 0.95), v0=st.floats(0.5, 200.0), t=st.floats(0.1, 10.0))
    @settings(max_examples=60)
    def test_homogeneity_in_barrier_and_initial_value(self, h, v0, t):
        # H and V0 enter only through their ratio: scaling both is a no-op
        vols = flat_vols(0.3)
        ratio_a = (h * v0) / v0
        ratio_b = (h * 2.0 * v0) / (2.0 * v0)
        qa = at1p_survival(At1pParams(ratio_a, 0.0, vols), t)
        qb = at1p_survival(At1pParams(ratio_b, 0.0, vols), t)
        assert qa == qb


class TestBarrierLevel:
    def test_zero_drift_flat_barrier(self):
        params = At1pParams(0.4, 0.0, flat_vols(0.2))
        assert barrier_level(params, DiscountCurve(flat_rate=0.0), 7.0) == pytest.approx(0.4)

    def test_grows_with_rates(self):
        params = At1pParams(0.4, 0.0, flat_vols(0.2))
        level = barrier_level(params, DiscountCurve(flat_rate=0.03), 1.0)
        assert level == pytest.approx(0.4 * math.exp(0.03), rel=1e-12)

    def test_volatility_exponent_lowers_barrier(self):
        params = At1pParams(0.4, 0.5, flat_vols(0.2))
        level = barrier_level(params, DiscountCurve(flat_rate=0.0), 1.0)
        assert level == pytest.approx(0.4 * math.exp(-0.5 * 0.04), rel=1e-12)

    def test_equals_h_over_discount_when_b_zero(self):
        params = At1pParams(0.4, 0.0, flat_vols(0.2))
        curve = DiscountCurve(flat_rate=0.025)
        assert barrier_level(params, curve, 6.0) == pytest.approx(
            0.4 / curve.discount(6.0), rel=1e-12)


class TestSbtvSurvival:
    def test_published_scenario_mixture_2007(self):
        vols = VolatilityTermStructure((1.0, 3.0, 5.0, 7.0, 10.0),
                                       (0.166, 0.166, 0.166, 0.126, 0.129))
        params = SbtvParams(((0.4, 0.962), (0.7313, 0.038)), 0.0, vols)
        assert sbtv_survival(params, 1.0) == pytest.approx(0.997, abs=1e-3)

    def test_published_scenario_mixture_sept_2008(self):
        vols = VolatilityTermStructure((1.0, 3.0, 5.0, 7.0, 10.0),
                                       (0.196, 0.196, 0.196, 0.218, 0.237))
        params = SbtvParams(((0.4, 0.5), (0.8427, 0.5)), 0.0, vols)
        assert sbtv_survival(params, 10.0) == pytest.approx(0.436, abs=0.01)

    def test_degenerate_single_scenario(self):
        vols = LEHMAN_2007_VOLS
        mix = SbtvParams(((0.4, 1.0),), 0.0, vols)
        single = At1pParams(0.4, 0.0, vols)
        for t in (0.5, 2.0, 7.5):
            assert sbtv_survival(mix, t) == at1p_survival(single, t)

    @given(p1=st.floats(0.0, 1.0), t=st.floats(0.1, 10.0))
    @settings(max_examples=60)
    def test_convex_combination_bounds(self, p1, t):
        vols = flat_vols(0.25)
        params = SbtvParams(((0.3, p1), (0.8, 1.0 - p1)), 0.0, vols)
        qs = [at1p_survival(sp, t) for sp in params.scenario_params()]
        q = sbtv_survival(params, t)
        assert min(qs) - 1e-15 <= q <= max(qs) + 1e-15

    def test_validation(self):
        vols = flat_vols(0.2)
        with pytest.raises(DomainError):
            SbtvParams(((0.4, 0.5), (0.7, 0.4)), 0.0, vols)  # probs sum != 1
        with pytest.raises(DomainError):
            SbtvParams(((0.7, 0.5), (0.4, 0.5)), 0.0, vols)  # not increasing
        with pytest.raises(DomainError):
            SbtvParams(((0.4, 0.5), (1.1, 0.5)), 0.0, vols)  # barrier >= 1


class TestIntensitySurvival:
    def test_zero_hazard(self):
        hazard = HazardCurve((10.0,), (0.0,))
        for t in (0.0, 1.0, 25.0):
            assert intensity_survival(hazard, t) == 1.0

    def test_single_bucket_reference_value(self):
        hazard = HazardCurve((1.0,), (0.00267,))
        assert intensity_survival(hazard, 1.0) == pytest.approx(
            math.exp(-0.00267), rel=1e-14)
        assert intensity_survival(hazard, 1.0) == pytest.approx(0.997, abs=5e-4)

    def test_two_bucket_integral(self):
        hazard = HazardCurve((1.0, 2.0), (0.02, 0.04))
        assert intensity_survival(hazard, 2.0) == pytest.approx(math.exp(-0.06), rel=1e-14)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            intensity_survival(HazardCurve((1.0,), (0.01,)), -0.5)

    @given(lam=st.floats(0.0, 1.0), t=st.floats(0.0, 20.0))
    def test_bounds_and_start(self, lam, t):
        hazard = HazardCurve((2.0, 5.0), (lam, 0.5 * lam))
        q = intensity_survival(hazard, t)
        assert 0.0 < q <= 1.0
        assert intensity_survival(hazard, 0.0) == 1.0
