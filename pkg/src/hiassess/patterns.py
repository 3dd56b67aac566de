"""Reference patterns built from a prognosis ensemble.

Three kinds are used by the metrics: the pointwise mean trajectory (MSE,
MAPE), a fan of pointwise quantile lines (SQIF) and a single quantile line of
the forward increments (Kupiec POF/TUFF).

Quantiles everywhere use plotting positions ``(k - 0.5) / n`` on the sorted
sample: with ``k* = max{k : (k - 0.5)/n < q/100}`` the estimate interpolates
linearly from ``x[k*]`` towards ``x[k*+1]``. Level 0 is the minimum, level 100
the maximum, and levels outside the plotting-position support clamp to those.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .series import PrognosisEnsemble, Trajectory

DEFAULT_FAN_LEVELS = tuple(range(0, 101, 5))


def _order_statistic_weights(n: int, q: float) -> tuple[int, int, float]:
    """Zero-based (lower, upper, weight) so that Q = x[lo] + w * (x[hi] - x[lo])."""
    if n < 1:
        raise ValueError("quantile of an empty sample")
    if not 0 <= q <= 100:
        raise ValueError(f"quantile level must be in [0, 100], got {q}")
    if q == 0:
        return 0, 0, 0.0
    if q == 100:
        return n - 1, n - 1, 0.0
    level = q / 100
    positions = (np.arange(1, n + 1) - 0.5) / n
    k_star = int(np.count_nonzero(positions < level))
    if k_star == 0:
        return 0, 0, 0.0
    if k_star == n:
        return n - 1, n - 1, 0.0
    lo_pos = (k_star - 0.5) / n
    hi_pos = (k_star + 1 - 0.5) / n
    weight = (level - lo_pos) / (hi_pos - lo_pos)
    return k_star - 1, k_star, weight


def empirical_quantile(values, q: float) -> float:
    """Quantile of order ``q`` percent of a 1-D sample.

    >>> empirical_quantile([1, 2, 3, 4, 5], 50)
    3.0
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("quantile of an empty sample")
    lo, hi, w = _order_statistic_weights(x.size, q)
    return float(x[lo] + w * (x[hi] - x[lo]))


def quantile_lines(samples, levels: Iterable[float]) -> np.ndarray:
    """Pointwise quantiles across the first axis of ``samples``.

    Returns an array of shape ``(len(levels),) + samples.shape[1:]``.
    """
    x = np.sort(np.asarray(samples, dtype=float), axis=0)
    n = x.shape[0]
    out = []
    for q in levels:
        lo, hi, w = _order_statistic_weights(n, q)
        out.append(x[lo] + w * (x[hi] - x[lo]))
    return np.stack(out)


@dataclass(frozen=True)
class MeanPattern:
    series: np.ndarray


@dataclass(frozen=True)
class QuantileFan:
    levels: tuple[float, ...]
    lines: np.ndarray  # (len(levels), window length)

    def line(self, level: float) -> np.ndarray:
        for i, q in enumerate(self.levels):
            if abs(q - level) < 1e-9:
                return self.lines[i]
        raise KeyError(level)

    def has_level(self, level: float) -> bool:
        return any(abs(q - level) < 1e-9 for q in self.levels)


@dataclass(frozen=True)
class IncrementQuantileLine:
    order: float  # percent
    series: np.ndarray  # window length - 1


Pattern = Union[MeanPattern, QuantileFan, IncrementQuantileLine]


def _as_array(ensemble) -> np.ndarray:
    if isinstance(ensemble, PrognosisEnsemble):
        return ensemble.trajectories
    return np.asarray(ensemble, dtype=float)


def mean_pattern(ensemble) -> MeanPattern:
    return MeanPattern(_as_array(ensemble).mean(axis=0))


def quantile_fan(ensemble, levels: Sequence[float] = DEFAULT_FAN_LEVELS) -> QuantileFan:
    levels = tuple(sorted(float(q) for q in levels))
    return QuantileFan(levels, quantile_lines(_as_array(ensemble), levels))


def increments(trajectory) -> np.ndarray:
    """Forward differences ``x[t+1] - x[t]`` along the last axis."""
    if isinstance(trajectory, Trajectory):
        trajectory = trajectory.values
    x = np.asarray(trajectory, dtype=float)
    if x.shape[-1] < 2:
        raise ValueError("increments need at least 2 points")
    return np.diff(x, axis=-1)


def increment_quantile_line(ensemble, p: float) -> IncrementQuantileLine:
    inc = increments(_as_array(ensemble))
    return IncrementQuantileLine(float(p), quantile_lines(inc, [p])[0])
