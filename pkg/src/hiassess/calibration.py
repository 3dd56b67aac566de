"""Monte-Carlo check of the verdict rule when the truth comes from the model.

A single prognosis ensemble is simulated on the test window of a regime and
shared by all test trajectories, which are independent draws from the same
model. Under this null the share of test trajectories judged good at
threshold theta should be close to ``100 - theta``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .assessment import MetricConfig, build_pattern, metric_values, scores_many
from .degradation import DegradationParams, simulate_ensemble
from .metrics import ALL_METRICS, MetricKind

CALIBRATION_THETA_GRID = (10, 20, 30, 40, 50, 60, 70, 80, 90)
_REGIMES = {"second": 2, "third": 3, 2: 2, 3: 3}

# seed streams of a calibration run
PROGNOSIS_STREAM = 0
TEST_STREAM = 1


def regime_window(params: DegradationParams, regime, split: float = 0.8):
    """Training and test windows of the second or third regime.

    The training part is the first ``floor(split * length)`` points of the
    regime and the test part is the rest.
    """
    if regime not in _REGIMES:
        raise ValueError(f"regime must be 'second' or 'third', got {regime!r}")
    if not 0 < split < 1:
        raise ValueError(f"split must be in (0, 1), got {split}")
    start, end = params.regime_bounds(_REGIMES[regime])
    return split_window((start, end), split)


def split_window(window, split: float):
    start, end = window
    length = end - start + 1
    # guard against 0.8 * 3000 landing a hair under 2400
    n_train = math.floor(split * length + 1e-9)
    if n_train < 1:
        raise ValueError(f"training window is empty for split {split} on {length} points")
    if n_train >= length:
        raise ValueError(f"test window is empty for split {split} on {length} points")
    return (start, start + n_train - 1), (start + n_train, end)


@dataclass(frozen=True)
class CalibrationSpec:
    params: DegradationParams
    regime: str = "second"
    split: float = 0.8
    n_prognoses: int = 1000
    n_tests: int = 1000
    metrics: tuple[MetricKind, ...] = ALL_METRICS
    theta_grid: tuple[float, ...] = CALIBRATION_THETA_GRID
    master_seed: int = 0
    noise_scale: float = 1.0
    metric_config: MetricConfig = field(default_factory=MetricConfig)

    def __post_init__(self):
        if not 0 < self.split < 1:
            raise ValueError("split must be in (0, 1)")
        if self.n_prognoses < 2 or self.n_tests < 2:
            raise ValueError("n_prognoses and n_tests must both be >= 2")
        if not self.theta_grid:
            raise ValueError("theta grid is empty")


@dataclass
class CalibrationTable:
    metrics: tuple[MetricKind, ...]
    theta_grid: tuple[float, ...]
    percent: np.ndarray  # (len(theta_grid), len(metrics))
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key) -> float:
        metric, theta = key
        return float(self.percent[self.theta_grid.index(theta), self.metrics.index(metric)])


def _chunks(n: int, parts: int):
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def null_scores(spec: CalibrationSpec, workers: int = 1) -> dict[MetricKind, np.ndarray]:
    """Assessment score of every test trajectory, per metric.

    Test trajectories are scored in chunks on ``workers`` threads; each score
    depends only on its own row, so the result does not depend on ``workers``.
    """
    _, test = regime_window(spec.params, spec.regime, spec.split)
    prognoses = simulate_ensemble(
        spec.params, test, spec.n_prognoses, spec.master_seed,
        stream=PROGNOSIS_STREAM, noise_scale=spec.noise_scale,
    )
    actuals = simulate_ensemble(
        spec.params, test, spec.n_tests, spec.master_seed,
        stream=TEST_STREAM, noise_scale=spec.noise_scale,
    ).trajectories

    out = {}
    for metric in spec.metrics:
        pattern = build_pattern(prognoses, metric, spec.metric_config)
        m_p = np.asarray(metric_values(pattern, metric, prognoses.trajectories, spec.metric_config))

        def score_rows(bounds, pattern=pattern, m_p=m_p, metric=metric):
            a, b = bounds
            m_w = metric_values(pattern, metric, actuals[a:b], spec.metric_config)
            return scores_many(m_p, m_w)

        chunks = _chunks(spec.n_tests, max(1, workers))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(score_rows, chunks))
        else:
            parts = [score_rows(c) for c in chunks]
        out[metric] = np.concatenate(parts)
    return out


def tabulate(scores: dict[MetricKind, np.ndarray], theta_grid: Sequence[float]) -> np.ndarray:
    metrics = list(scores)
    table = np.empty((len(theta_grid), len(metrics)))
    for j, metric in enumerate(metrics):
        s = scores[metric]
        for i, theta in enumerate(theta_grid):
            table[i, j] = 100.0 * np.count_nonzero(s > theta) / s.size
    return table


def run_calibration(spec: CalibrationSpec, workers: int = 1) -> CalibrationTable:
    scores = null_scores(spec, workers)
    train, test = regime_window(spec.params, spec.regime, spec.split)
    return CalibrationTable(
        metrics=tuple(spec.metrics),
        theta_grid=tuple(spec.theta_grid),
        percent=tabulate(scores, spec.theta_grid),
        meta={
            "regime": spec.regime,
            "train_window": list(train),
            "test_window": list(test),
            "n_prognoses": spec.n_prognoses,
            "n_tests": spec.n_tests,
            "seed": spec.master_seed,
        },
    )
