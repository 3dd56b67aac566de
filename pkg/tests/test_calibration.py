import numpy as np
import pytest

from hiassess.calibration import (
    CALIBRATION_THETA_GRID,
    CalibrationSpec,
    null_scores,
    regime_window,
    run_calibration,
    split_window,
)
from hiassess.degradation import REFERENCE_PARAMS
from hiassess.metrics import ALL_METRICS, MetricKind


def small_spec(**kw):
    base = dict(params=REFERENCE_PARAMS, n_prognoses=60, n_tests=40, master_seed=3)
    base.update(kw)
    return CalibrationSpec(**base)


class TestWindows:
    def test_second_regime(self):
        assert regime_window(REFERENCE_PARAMS, "second") == ((6001, 8400), (8401, 9000))

    def test_third_regime(self):
        assert regime_window(REFERENCE_PARAMS, "third") == ((9001, 9800), (9801, 10000))

    def test_half_split(self):
        assert regime_window(REFERENCE_PARAMS, "second", 0.5) == ((6001, 7500), (7501, 9000))

    def test_split_rounding(self):
        # 0.8 * 3000 is 2399.9999... in binary floating point
        assert split_window((1, 3000), 0.8) == ((1, 2400), (2401, 3000))

    def test_empty_training_window(self):
        with pytest.raises(ValueError):
            split_window((1, 1), 0.5)

    def test_bad_regime(self):
        with pytest.raises(ValueError):
            regime_window(REFERENCE_PARAMS, "first")


class TestNullScores:
    def test_zero_noise_is_all_ties(self):
        table = run_calibration(small_spec(noise_scale=0.0))
        for metric in ALL_METRICS:
            for theta in CALIBRATION_THETA_GRID:
                assert table[metric, theta] == (100.0 if theta < 50 else 0.0)

    def test_deterministic(self):
        a = run_calibration(small_spec())
        b = run_calibration(small_spec())
        assert np.array_equal(a.percent, b.percent)

    def test_seed_changes_result(self):
        a = null_scores(small_spec(metrics=(MetricKind.MSE,)))
        b = null_scores(small_spec(metrics=(MetricKind.MSE,), master_seed=4))
        assert not np.array_equal(a[MetricKind.MSE], b[MetricKind.MSE])

    @pytest.mark.parametrize("workers", [2, 3, 8])
    def test_worker_count_does_not_matter(self, workers):
        spec = small_spec(regime="third")
        one = null_scores(spec, workers=1)
        many = null_scores(spec, workers=workers)
        for metric in spec.metrics:
            assert np.array_equal(one[metric], many[metric])

    def test_percent_monotone_in_theta(self):
        table = run_calibration(small_spec(n_prognoses=200, n_tests=200))
        assert np.all(np.diff(table.percent, axis=0) <= 0)
        assert table.meta["test_window"] == [8401, 9000]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            small_spec(n_tests=1)
        with pytest.raises(ValueError):
            small_spec(theta_grid=())
