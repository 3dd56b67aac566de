"""Ensemble-referenced verdicts on a true health-index series.

For one metric the procedure is: build the metric's pattern from the n
prognosed trajectories, score every prognosis against it (``m_p``), score the
actual series against it (``m_w``), and grade the actual series by the share
of prognoses it beats. Ties count half, which makes the discrete Kupiec
metrics usable with the same rule as the continuous ones. A prediction is good
at threshold theta when that grade exceeds theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import metrics as M
from .metrics import MetricKind, SqifConfig
from .patterns import (
    Pattern,
    increment_quantile_line,
    increments,
    empirical_quantile,
    mean_pattern,
    quantile_fan,
)
from .series import PrognosisEnsemble, Trajectory

DEFAULT_THETA_GRID = (1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90)


@dataclass(frozen=True)
class MetricConfig:
    sqif: SqifConfig = field(default_factory=SqifConfig)
    pof_order: float = M.POF_ORDER
    mape_eps: float = 1e-12


def build_pattern(ensemble: PrognosisEnsemble, metric: MetricKind, cfg: MetricConfig | None = None) -> Pattern:
    cfg = cfg or MetricConfig()
    if metric in (MetricKind.MSE, MetricKind.MAPE):
        return mean_pattern(ensemble)
    if metric is MetricKind.SQIF:
        return quantile_fan(ensemble, cfg.sqif.fan_levels)
    if metric is MetricKind.KUPIEC_POF:
        return increment_quantile_line(ensemble, cfg.pof_order)
    _, order = M.solve_tuff_order(ensemble.length - 1)
    return increment_quantile_line(ensemble, order)


def metric_values(pattern: Pattern, metric: MetricKind, trajectories, cfg: MetricConfig | None = None):
    """Metric of one trajectory (1-D) or each row of a batch (2-D) against ``pattern``."""
    cfg = cfg or MetricConfig()
    x = np.asarray(trajectories, dtype=float)
    if metric is MetricKind.MSE:
        return M.mse(pattern.series, x)
    if metric is MetricKind.MAPE:
        return M.mape(pattern.series, x, eps=cfg.mape_eps)
    if metric is MetricKind.SQIF:
        return M.sqif(pattern, x, cfg.sqif)
    if metric is MetricKind.KUPIEC_POF:
        return M.kupiec_pof(pattern, increments(x))
    return M.kupiec_tuff(pattern, increments(x))


def metric_set(ensemble: PrognosisEnsemble, metric: MetricKind, cfg: MetricConfig | None = None) -> np.ndarray:
    """Metric of every ensemble member against the pattern of the same ensemble."""
    pattern = build_pattern(ensemble, metric, cfg)
    return np.asarray(metric_values(pattern, metric, ensemble.trajectories, cfg))


def assessment_score(m_p, m_w: float) -> tuple[float, float, float]:
    """Return ``(gamma1, gamma2, score)`` in percent.

    gamma1 counts prognoses strictly worse than the actual series, gamma2 worse
    or tied; the score is their midpoint.
    """
    m_p = np.asarray(m_p, dtype=float)
    if m_p.size == 0:
        raise ValueError("m_p is empty")
    gamma1 = 100.0 * np.count_nonzero(m_p > m_w) / m_p.size
    gamma2 = 100.0 * np.count_nonzero(m_p >= m_w) / m_p.size
    return gamma1, gamma2, (gamma1 + gamma2) / 2


def scores_many(m_p, m_w) -> np.ndarray:
    """Vectorized tie-midpoint score for an array of actual-series metric values."""
    sorted_p = np.sort(np.asarray(m_p, dtype=float))
    m_w = np.asarray(m_w, dtype=float)
    n = sorted_p.size
    greater = n - np.searchsorted(sorted_p, m_w, side="right")
    greater_equal = n - np.searchsorted(sorted_p, m_w, side="left")
    # same arithmetic as assessment_score so both paths agree bit for bit
    return (100.0 * greater / n + 100.0 * greater_equal / n) / 2


def threshold_quantile(m_p, theta: float) -> float:
    """Metric value an actual series must stay below to be good at ``theta``."""
    if not 0 < theta < 100:
        raise ValueError(f"theta must be in (0, 100), got {theta}")
    return empirical_quantile(m_p, 100 - theta)


def decide(score: float, theta_grid: Sequence[float]) -> dict[float, int]:
    return {theta: int(score > theta) for theta in theta_grid}


@dataclass
class AssessmentReport:
    metric: MetricKind
    m_w: float
    m_p: np.ndarray
    gamma1: float
    gamma2: float
    score: float
    theta_grid: tuple[float, ...]
    decisions: dict[float, int]
    meta: dict = field(default_factory=dict)
    pattern: Pattern | None = None
    actual: Trajectory | None = None

    def good(self, theta: float) -> bool:
        return self.score > theta


def _check_theta_grid(theta_grid) -> tuple[float, ...]:
    grid = tuple(theta_grid)
    if not grid:
        raise ValueError("theta grid is empty")
    for theta in grid:
        if not 0 < theta < 100:
            raise ValueError(f"theta must be in (0, 100), got {theta}")
    return grid


def assess(
    ensemble: PrognosisEnsemble,
    actual: Trajectory,
    metric: MetricKind,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    cfg: MetricConfig | None = None,
    meta: dict | None = None,
) -> AssessmentReport:
    if actual.window != ensemble.window:
        raise ValueError(
            f"actual series covers {actual.window}, ensemble window is {ensemble.window}"
        )
    grid = _check_theta_grid(theta_grid)
    pattern = build_pattern(ensemble, metric, cfg)
    m_p = np.asarray(metric_values(pattern, metric, ensemble.trajectories, cfg))
    m_w = float(metric_values(pattern, metric, actual.values, cfg))
    gamma1, gamma2, score = assessment_score(m_p, m_w)
    info = {"n": ensemble.n, "window": list(ensemble.window)}
    info.update(meta or {})
    return AssessmentReport(
        metric=metric,
        m_w=m_w,
        m_p=m_p,
        gamma1=gamma1,
        gamma2=gamma2,
        score=score,
        theta_grid=grid,
        decisions=decide(score, grid),
        meta=info,
        pattern=pattern,
        actual=actual,
    )


def assess_all(
    ensemble: PrognosisEnsemble,
    actual: Trajectory,
    metrics: Sequence[MetricKind] = M.ALL_METRICS,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    cfg: MetricConfig | None = None,
    meta: dict | None = None,
) -> list[AssessmentReport]:
    return [assess(ensemble, actual, m, theta_grid, cfg, meta) for m in metrics]
