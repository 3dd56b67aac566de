"""Prediction-quality metrics. Every metric is lower-is-better.

Functions accept a single trajectory (1-D) or a batch of trajectories stacked
along the first axis (2-D) and reduce over the last axis, so a whole ensemble
can be scored in one call.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DivisionHazardError
from .patterns import DEFAULT_FAN_LEVELS, IncrementQuantileLine, QuantileFan

#: Quantile order of the increment line used by Kupiec's POF.
POF_ORDER = 51.0


class MetricKind(enum.Enum):
    MSE = "MSE"
    MAPE = "MAPE"
    SQIF = "SQIF"
    KUPIEC_POF = "POF"
    KUPIEC_TUFF = "TUFF"

    @property
    def pattern_kind(self) -> str:
        return {
            MetricKind.MSE: "mean",
            MetricKind.MAPE: "mean",
            MetricKind.SQIF: "quantile_fan",
            MetricKind.KUPIEC_POF: "increment_line",
            MetricKind.KUPIEC_TUFF: "increment_line",
        }[self]

    @property
    def lower_is_better(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return {
            MetricKind.KUPIEC_POF: "Kupiec's POF",
            MetricKind.KUPIEC_TUFF: "Kupiec's TUFF",
        }.get(self, self.value)

    @classmethod
    def parse(cls, name: str) -> MetricKind:
        key = name.strip().upper().replace("'S", "").replace("_", " ").replace("-", " ")
        key = " ".join(key.split())
        aliases = {
            "MSE": cls.MSE, "MAPE": cls.MAPE, "SQIF": cls.SQIF,
            "POF": cls.KUPIEC_POF, "KUPIEC POF": cls.KUPIEC_POF,
            "TUFF": cls.KUPIEC_TUFF, "KUPIEC TUFF": cls.KUPIEC_TUFF,
        }
        if key not in aliases:
            raise ValueError(f"unknown metric {name!r}; expected one of MSE, MAPE, SQIF, POF, TUFF")
        return aliases[key]


ALL_METRICS = tuple(MetricKind)


@dataclass(frozen=True)
class SqifConfig:
    bands: tuple[float, ...] = tuple(range(0, 101, 10))
    fan_levels: tuple[float, ...] = DEFAULT_FAN_LEVELS

    def __post_init__(self):
        levels = {float(q) for q in self.fan_levels}
        for q in self.bands:
            for edge in ((100 - q) / 2, (100 + q) / 2):
                if not any(abs(edge - lv) < 1e-9 for lv in levels):
                    raise ConfigError(
                        f"SQIF band {q}% needs fan level {edge}%, which is not configured"
                    )


def _check_lengths(pattern: np.ndarray, trajectory: np.ndarray):
    if pattern.ndim != 1 or trajectory.shape[-1] != pattern.shape[0]:
        raise ValueError(
            f"pattern length {pattern.shape[-1]} does not match trajectory length "
            f"{trajectory.shape[-1]}"
        )
    if pattern.shape[0] == 0:
        raise ValueError("empty series")


def _scalar(result):
    return float(result) if np.ndim(result) == 0 else result


def mse(pattern, trajectory):
    p = np.asarray(pattern, dtype=float)
    t = np.asarray(trajectory, dtype=float)
    _check_lengths(p, t)
    return _scalar(np.mean((p - t) ** 2, axis=-1))


def mape(pattern, trajectory, eps: float = 1e-12):
    """Mean of ``|P - T| / |P|``; raises if any ``|P| <= eps``."""
    p = np.asarray(pattern, dtype=float)
    t = np.asarray(trajectory, dtype=float)
    _check_lengths(p, t)
    bad = np.flatnonzero(np.abs(p) <= eps)
    if bad.size:
        raise DivisionHazardError(int(bad[0]), float(p[bad[0]]), eps)
    return _scalar(np.mean(np.abs(p - t) / np.abs(p), axis=-1))


def band_coverage(fan: QuantileFan, trajectory, band: float) -> np.ndarray:
    """Fraction of points inside the central ``band``% fan band, edges included."""
    lower = fan.line((100 - band) / 2)
    upper = fan.line((100 + band) / 2)
    t = np.asarray(trajectory, dtype=float)
    return np.mean((t >= lower) & (t <= upper), axis=-1)


def sqif(fan: QuantileFan, trajectory, cfg: SqifConfig | None = None):
    """Mean squared gap between observed band coverage and nominal band level."""
    cfg = cfg or SqifConfig()
    t = np.asarray(trajectory, dtype=float)
    for q in cfg.bands:
        for edge in ((100 - q) / 2, (100 + q) / 2):
            if not fan.has_level(edge):
                raise ConfigError(f"fan lacks level {edge}% needed by SQIF band {q}%")
    _check_lengths(fan.lines[0], t)
    total = 0.0
    for q in cfg.bands:
        total = total + (band_coverage(fan, t, q) - q / 100) ** 2
    return _scalar(total / len(cfg.bands))


def pof_statistic(x, n_obs: int, p_star: float):
    """Kupiec proportion-of-failures likelihood ratio for ``x`` exceedances in ``n_obs``."""
    x = np.asarray(x, dtype=float)
    n = float(n_obs)
    interior = (x > 0) & (x < n)
    xi = np.where(interior, x, n / 2)  # placeholder avoids log(0) in masked lanes
    inner = -2 * ((n - xi) * np.log(n * (1 - p_star) / (n - xi)) + xi * np.log(n * p_star / xi))
    out = np.where(
        interior,
        inner,
        np.where(x == 0, -2 * n * math.log(1 - p_star), -2 * n * math.log(p_star)),
    )
    return _scalar(out)


def tuff_statistic(x, n_obs: int, p_star: float):
    """Kupiec time-until-first-failure statistic.

    ``x`` is the 1-based index of the first exceedance, 0 meaning none. The
    first-observation case uses ``-2 N log p*``.
    """
    x = np.asarray(x, dtype=float)
    n = float(n_obs)
    later = x > 1
    xi = np.where(later, x, 2.0)
    inner = -2 * (
        math.log(p_star)
        + (xi - 1) * math.log(1 - p_star)
        + xi * np.log(xi)
        - (xi - 1) * np.log(xi - 1)
    )
    out = np.where(
        later,
        inner,
        np.where(x == 1, -2 * n * math.log(p_star), -2 * n * math.log(1 - p_star)),
    )
    return _scalar(out)


def _increment_inputs(line: IncrementQuantileLine, increments):
    s = np.asarray(increments, dtype=float)
    if s.shape[-1] == 0:
        raise ValueError("no increments to score")
    _check_lengths(line.series, s)
    return s, s > line.series


def kupiec_pof(line: IncrementQuantileLine, increments):
    """POF statistic on the count of increments strictly above the quantile line.

    The exceedance probability is ``1 - line.order / 100``.
    """
    s, exceed = _increment_inputs(line, increments)
    x = np.count_nonzero(exceed, axis=-1)
    return pof_statistic(x, s.shape[-1], 1 - line.order / 100)


def first_exceedance(line: IncrementQuantileLine, increments):
    """1-based index of the first increment above the line (0 when none)."""
    _, exceed = _increment_inputs(line, increments)
    return np.where(exceed.any(axis=-1), exceed.argmax(axis=-1) + 1, 0)


def solve_tuff_order(n_obs: int, tol: float = 1e-12) -> tuple[float, float]:
    """Exceedance probability ``p*`` with ``(1 - p*)**N == p*``, and the line order.

    Returns ``(p_star, order_percent)`` where ``order_percent = 100 (1 - p_star)``.
    The left side falls and the right side rises on (0, 1), so bisection on
    ``g(x) = (1 - x)**N - x`` brackets the single root.
    """
    if n_obs < 1:
        raise ValueError(f"N must be >= 1, got {n_obs}")
    lo, hi = 0.0, 1.0  # g(lo) = 1 > 0, g(hi) = -1 < 0
    mid = 0.5
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):  # interval is down to adjacent doubles
            break
        g = (1.0 - mid) ** n_obs - mid
        if g == 0.0 or hi - lo < tol * 1e-6:
            break
        if g > 0:
            lo = mid
        else:
            hi = mid
    return mid, 100.0 * (1.0 - mid)


def kupiec_tuff(line: IncrementQuantileLine, increments):
    s = np.asarray(increments, dtype=float)
    x = first_exceedance(line, s)
    return tuff_statistic(x, s.shape[-1], 1 - line.order / 100)
