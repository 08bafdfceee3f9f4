import math

import numpy as np
import pytest

from rarehc import rng as rngmod
from rarehc.errors import DomainError
from rarehc.models import ModelSpec, RareWeakParams
from rarehc.montecarlo import (
    AggregateModelParams,
    RowModelParams,
    aggregate_experiment,
    aggregate_scores,
    best_error_sum,
    calibrate_threshold,
    error_rates,
    null_hc_statistics,
    power_point,
    power_sweep,
    row_scores,
    rows_experiment,
)

NM = ModelSpec()


class TestHelpers:
    def test_error_rates(self):
        t1, t2 = error_rates([1, 2, 3, 4], [2, 5, 6, 7], 3)
        assert (t1, t2) == (0.25, 0.25)

    def test_best_error_sum_separated(self):
        assert best_error_sum([1, 2, 3], [4, 5, 6]) == 0.0

    def test_best_error_sum_identical(self):
        assert best_error_sum([1, 2, 3], [1, 2, 3]) == 1.0

    def test_best_error_sum_brute(self, rng):
        a, b = rng.normal(size=60), rng.normal(0.7, size=40)
        brute = min(sum(a > h) / 60 + sum(b <= h) / 40 for h in np.concatenate(([-np.inf], a, b)))
        assert best_error_sum(a, b) == pytest.approx(brute)

    def test_substreams_independent_of_order(self):
        a = [rngmod.substream_seed(1, 2, 0, i) for i in range(5)]
        b = [rngmod.substream_seed(1, 2, 0, i) for i in reversed(range(5))][::-1]
        assert a == b
        assert len(set(a)) == 5
        assert rngmod.substream_seed(1, 2, 0, 0) != rngmod.substream_seed(2, 2, 0, 0)


class TestCalibration:
    def test_level_one_sentinel(self):
        assert calibrate_threshold(100, 0.1, 1.0, 100, seed=1) == -math.inf

    def test_validation(self):
        with pytest.raises(DomainError):
            calibrate_threshold(100, 0.1, 0.05, 50, seed=1)
        with pytest.raises(DomainError):
            calibrate_threshold(100, 0.1, 0.0, 200, seed=1)

    def test_monotone_in_level(self):
        levels = [0.5, 0.2, 0.1, 0.05, 0.01]
        thr = [calibrate_threshold(1000, 0.1, lv, 500, seed=4) for lv in levels]
        assert all(b >= a for a, b in zip(thr, thr[1:]))

    def test_lower_nearest_rank(self):
        stats_ = null_hc_statistics(500, 0.1, 200, seed=4)
        thr = calibrate_threshold(500, 0.1, 0.1, 200, seed=4)
        assert thr == np.sort(stats_)[int(math.floor(0.9 * 199))]

    def test_fresh_seed_type1(self):
        n, reps = 10_000, 4000
        thr = calibrate_threshold(n, 0.1, 0.05, reps, seed=21)
        fresh = null_hc_statistics(n, 0.1, reps, seed=22, stream=rngmod.NULL)
        assert np.mean(fresh > thr) == pytest.approx(0.05, abs=0.01)


class TestPowerPoint:
    def test_full_power(self):
        e = power_point(RareWeakParams(10_000, 0.6, 1.2), NM, 0.05, 500, seed=1)
        assert e.error_sum < 0.2

    def test_powerless(self):
        e = power_point(RareWeakParams(10_000, 0.7, 0.05), NM, 0.05, 500, seed=1)
        assert e.error_sum > 0.8
        assert abs(e.type1 - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / 500)

    def test_no_signal(self):
        e = power_point(RareWeakParams(2000, 0.7, 0.0), NM, 0.05, 400, seed=2, cal_reps=1000)
        assert e.type2 == pytest.approx(0.95, abs=3 * e.se)
        assert e.error_sum == pytest.approx(1.0, abs=3 * e.se)

    def test_fields_consistent(self):
        e = power_point(RareWeakParams(1000, 0.7, 0.3), NM, 0.05, 200, seed=3, cal_reps=400)
        assert e.error_sum == e.type1 + e.type2
        assert 0 <= e.type1 <= 1 and 0 <= e.type2 <= 1
        assert e.se == pytest.approx(math.sqrt(e.type1 * (1 - e.type1) / 200 + e.type2 * (1 - e.type2) / 200))
        assert e.best_error_sum <= e.error_sum
        assert e.calibration_seed == 3
        assert e.threshold == calibrate_threshold(1000, 0.1, 0.05, 400, seed=3)

    def test_unsampled_family(self):
        from rarehc.models import Family

        with pytest.raises(DomainError):
            power_point(RareWeakParams(100, 0.7, 0.1), ModelSpec(Family.SMALL_POISSON), reps=10, seed=1)


class TestSweep:
    def test_single_cell_equals_point(self):
        [cell] = power_sweep([(0.7, 0.2)], 1000, NM, 0.05, 100, seed=9, cal_reps=300)
        point = power_point(RareWeakParams(1000, 0.7, 0.2), NM, 0.05, 100, seed=9, cal_reps=300)
        assert cell == point

    def test_row_count_and_failed_cell(self):
        out = power_sweep([(0.7, 0.1), (0.4, 0.1), (0.8, 0.5)], 500, NM, 0.05, 50, seed=9, cal_reps=200)
        assert len(out) == 3
        assert out[1] is None and out[0] is not None and out[2] is not None

    def test_error_sum_decreases_with_r(self):
        rs = [0.05, 0.3, 0.8, 1.5]
        out = power_sweep([(0.6, r) for r in rs], 10_000, NM, 0.05, 400, seed=13, cal_reps=2000)
        for a, b in zip(out, out[1:]):
            assert b.error_sum <= a.error_sum + 2 * math.hypot(a.se, b.se)

    def test_workers_do_not_change_results(self):
        grid = [(0.6, 0.1), (0.7, 0.5)]
        a = power_sweep(grid, 500, NM, 0.05, 40, seed=17, cal_reps=120, workers=1)
        b = power_sweep(grid, 500, NM, 0.05, 40, seed=17, cal_reps=120, workers=3)
        assert a == b


class TestRows:
    def test_reduced_effect_scales_with_root_k(self):
        params = RowModelParams(2000, 9, 0.6, 0.3)
        rng = np.random.default_rng(5)
        planted_means = []
        for _ in range(200):
            _, reduced, planted = row_scores(params, rng)
            planted_means.extend(reduced[planted])
        assert np.mean(planted_means) == pytest.approx(3 * params.mu, abs=0.1)

    def test_null_rows_have_no_plant(self, rng):
        naive, reduced, planted = row_scores(RowModelParams(100, 4, 0.6, 0.3), rng, alternative=False)
        assert naive.shape == (400,) and reduced.shape == (100,) and planted.size == 0

    def test_k_one_matches(self):
        naive, reduced = rows_experiment(RowModelParams(2000, 1, 0.6, 0.5), 0.05, 300, seed=8, cal_reps=600)
        assert naive.variant == "naive" and reduced.variant == "reduced"
        assert naive.error_sum == pytest.approx(reduced.error_sum, abs=1e-12)

    def test_validation(self):
        with pytest.raises(DomainError):
            RowModelParams(100, 0, 0.6, 0.1)


class TestAggregate:
    def test_null_sum_of_squares_moments(self):
        params = AggregateModelParams(1000, 0.7, 0.05, 0.25)
        rng = np.random.default_rng(6)
        s = np.array([np.sum(aggregate_scores(params, rng, alternative=False) ** 2) for _ in range(4000)])
        se_mean = math.sqrt(2 * 1000 / 4000)
        assert s.mean() == pytest.approx(1000, abs=4 * se_mean)
        assert s.var() == pytest.approx(2000, rel=0.1)

    def test_degenerate_null_vs_null(self):
        params = AggregateModelParams(1000, 0.7, 0.0, 8.0)
        hc, chisq = aggregate_experiment(params, 0.05, 400, seed=2, cal_reps=1000)
        for e in (hc, chisq):
            assert e.error_sum == pytest.approx(1.0, abs=3 * e.se + 0.01)

    def test_validation(self):
        with pytest.raises(DomainError):
            AggregateModelParams(100, 0.7, 0.1, 0.0)
