import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hiassess.assessment import (
    DEFAULT_THETA_GRID,
    assess,
    assess_all,
    assessment_score,
    decide,
    metric_set,
    scores_many,
    threshold_quantile,
)
from hiassess.degradation import REFERENCE_PARAMS, simulate_ensemble, simulate_trajectory, derive_coefficients
from hiassess.metrics import ALL_METRICS, MetricKind
from hiassess.series import PrognosisEnsemble, Trajectory


def ens(rows, start=1):
    rows = np.asarray(rows, dtype=float)
    return PrognosisEnsemble((start, start + rows.shape[1] - 1), rows)


class TestMetricSet:
    def test_mse_of_symmetric_pair(self):
        # mean pattern is 0; each member sits 1 away at every point
        assert np.allclose(metric_set(ens([[1, 1, 1], [-1, -1, -1]]), MetricKind.MSE), [1, 1])

    def test_identical_members_score_zero(self):
        e = ens([[1, 2, 3, 4]] * 5)
        for metric in (MetricKind.MSE, MetricKind.MAPE):
            assert np.array_equal(metric_set(e, metric), np.zeros(5))

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(8, 6)) + 3
        mean = x.mean(axis=0)
        expected = [oracles.mse(mean, row) for row in x]
        assert np.allclose(metric_set(ens(x), MetricKind.MSE), expected, atol=1e-12)
        expected = [oracles.mape(mean, row) for row in x]
        assert np.allclose(metric_set(ens(x), MetricKind.MAPE), expected, atol=1e-12)

    def test_length_and_nonnegativity(self):
        e = simulate_ensemble(REFERENCE_PARAMS, (8401, 8460), 30, 2)
        for metric in ALL_METRICS:
            values = metric_set(e, metric)
            assert values.shape == (30,)
            assert np.all(values >= -1e-12)


class TestScore:
    def test_all_prognoses_worse(self):
        assert assessment_score([1, 2, 3, 4], 0.5) == (100.0, 100.0, 100.0)

    def test_all_prognoses_better(self):
        assert assessment_score([1, 2, 3, 4], 10) == (0.0, 0.0, 0.0)

    def test_midpoint_of_ties(self):
        g1, g2, score = assessment_score([1, 2, 2, 3], 2)
        assert (g1, g2, score) == (25.0, 75.0, 50.0)

    def test_all_tied(self):
        assert assessment_score([5, 5, 5], 5)[2] == 50.0

    def test_empty(self):
        with pytest.raises(ValueError):
            assessment_score([], 1.0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(0, 6).map(float), min_size=1, max_size=30),
        st.integers(-1, 7).map(float),
    )
    def test_scores_many_agrees(self, m_p, m_w):
        assert scores_many(m_p, [m_w])[0] == assessment_score(m_p, m_w)[2]

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(0, 100), min_size=1, max_size=30),
        st.floats(0, 100),
        st.floats(-50, 50),
    )
    def test_shift_invariance(self, m_p, m_w, c):
        # use integers scaled to avoid rounding changing the order
        m_p = np.round(np.asarray(m_p)) / 4
        m_w = round(m_w) / 4
        c = round(c) / 4
        assert assessment_score(m_p + c, m_w + c) == assessment_score(m_p, m_w)


class TestDecision:
    def test_strict_threshold(self):
        assert decide(50.0, [40, 50, 60]) == {40: 1, 50: 0, 60: 0}

    @given(st.floats(0, 100), st.lists(st.floats(0.01, 99.99), min_size=2, max_size=10, unique=True))
    def test_monotone_in_theta(self, score, grid):
        grid = sorted(grid)
        out = decide(score, grid)
        values = [out[t] for t in grid]
        assert values == sorted(values, reverse=True)

    def test_always_bad_when_beaten_by_everyone(self):
        e = ens([[0.0, 0.0, 0.0]] * 4)
        report = assess(e, Trajectory(1, [10.0, 10.0, 10.0]), MetricKind.MSE)
        assert report.score == 0
        assert all(v == 0 for v in report.decisions.values())


class TestThresholdQuantile:
    def test_median(self):
        assert threshold_quantile([1, 2, 3, 4, 5], 50) == 3

    def test_theta_range(self):
        for bad in (0, 100, -3):
            with pytest.raises(ValueError):
                threshold_quantile([1, 2], bad)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(0, 10_000), min_size=2, max_size=40, unique=True),
        st.integers(1, 99),
        st.integers(0, 10_000),
    )
    def test_equivalent_to_score_outside_bracket(self, m_p, theta, m_w):
        # with distinct m_p, "score > theta" and "m_w < threshold" can only
        # disagree within one order-statistic bracket around the threshold
        m_p = np.asarray(m_p, dtype=float)
        m_w = float(m_w) + 0.5  # no ties with m_p
        q = threshold_quantile(m_p, theta)
        srt = np.sort(m_p)
        k = np.searchsorted(srt, q)
        lo = srt[max(k - 1, 0)]
        hi = srt[min(k + 1, len(srt) - 1)]
        if lo <= m_w <= hi:
            return
        score = assessment_score(m_p, m_w)[2]
        assert (score > theta) == (m_w < q)


class TestAssess:
    def test_window_mismatch(self):
        e = ens([[1, 2, 3], [2, 3, 4]], start=10)
        with pytest.raises(ValueError):
            assess(e, Trajectory(11, [1, 2, 3]), MetricKind.MSE)

    def test_empty_theta_grid(self):
        e = ens([[1, 2, 3], [2, 3, 4]])
        with pytest.raises(ValueError):
            assess(e, Trajectory(1, [1, 2, 3]), MetricKind.MSE, theta_grid=[])

    def test_report_fields(self):
        window = (8401, 9000)
        e = simulate_ensemble(REFERENCE_PARAMS, window, 200, 5)
        coeffs = derive_coefficients(REFERENCE_PARAMS)
        actual = simulate_trajectory(REFERENCE_PARAMS, coeffs, window, np.random.SeedSequence(99))
        reports = assess_all(e, actual)
        assert [r.metric for r in reports] == list(ALL_METRICS)
        for r in reports:
            assert r.theta_grid == DEFAULT_THETA_GRID
            assert r.m_p.shape == (200,)
            assert r.gamma1 <= r.score <= r.gamma2
            assert r.decisions == {t: int(r.score > t) for t in DEFAULT_THETA_GRID}
            assert r.meta["n"] == 200

    def test_member_as_actual_matches_metric_set(self):
        e = simulate_ensemble(REFERENCE_PARAMS, (8401, 8500), 50, 6)
        member = e.member(3)
        report = assess(e, member, MetricKind.SQIF)
        assert report.m_w == metric_set(e, MetricKind.SQIF)[3]
