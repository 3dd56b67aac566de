"""Simple window models for real health-index data.

A window model is a trend plus a time-varying Gaussian scale fitted to one
regime of an observed series. Two forms are supported, mirroring the
degradation model: ``linear`` (line trend, line scale) for the warning regime
and ``exponential`` (``a * exp(b * u) + c`` trend, ``a' * exp(b' * u)`` scale)
for the critical regime, where ``u = t - origin`` counts from the window
start.

Scale is estimated from residuals. The linear form regresses
``|r| * sqrt(pi / 2)`` on time, which is unbiased for a centred Gaussian.
The exponential form takes its growth rate from a regression of ``log|r|``
and its level from the residual second moment.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .degradation import child_seed
from .series import PrognosisEnsemble, Trajectory

MIN_POINTS = 10
ABS_TO_SIGMA = math.sqrt(math.pi / 2)


@dataclass(frozen=True)
class WindowModel:
    kind: str  # "linear" | "exponential"
    origin: int
    trend_params: dict
    scale_params: dict
    scale_floor: float
    window: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "exponential"):
            raise ValueError(f"unknown window model kind {self.kind!r}")

    def trend(self, t) -> np.ndarray:
        u = np.asarray(t, dtype=float) - self.origin
        p = self.trend_params
        if self.kind == "linear":
            return p["slope"] * u + p["intercept"]
        return p["amplitude"] * np.exp(p["rate"] * u) + p["offset"]

    def scale(self, t) -> np.ndarray:
        u = np.asarray(t, dtype=float) - self.origin
        p = self.scale_params
        if self.kind == "linear":
            raw = p["slope"] * u + p["intercept"]
        else:
            raw = p["amplitude"] * np.exp(p["rate"] * u)
        return np.maximum(raw, self.scale_floor)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window) if self.window else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> WindowModel:
        window = d.get("window")
        return cls(
            kind=d["kind"],
            origin=int(d["origin"]),
            trend_params={k: float(v) for k, v in d["trend_params"].items()},
            scale_params={k: float(v) for k, v in d["scale_params"].items()},
            scale_floor=float(d["scale_floor"]),
            window=tuple(window) if window else None,
        )


def _prepare(data: Trajectory):
    if len(data) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points to fit a window, got {len(data)}")
    y = data.values
    u = np.arange(y.size, dtype=float)
    floor = 1e-9 * max(float(np.max(np.abs(y))), 1e-300)
    return u, y, floor


def _line_fit(u: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(u, y, 1)
    return float(slope), float(intercept)


def fit_linear_window(data: Trajectory) -> WindowModel:
    """Least-squares trend line plus a line through the scaled absolute residuals."""
    u, y, floor = _prepare(data)
    slope, intercept = _line_fit(u, y)
    resid = y - (slope * u + intercept)
    s_slope, s_intercept = _line_fit(u, np.abs(resid) * ABS_TO_SIGMA)
    return WindowModel(
        kind="linear",
        origin=data.start,
        trend_params={"slope": slope, "intercept": intercept},
        scale_params={"slope": s_slope, "intercept": s_intercept},
        scale_floor=floor,
        window=data.window,
    )


def rate_grid(length: int, n_rates: int = 400, min_total: float = 1e-3, max_total: float = 30.0) -> np.ndarray:
    """Candidate exponential rates, log-spaced in |rate|, both signs.

    Bounds are on the total growth exponent ``|rate| * (length - 1)`` so the
    grid adapts to the window length.
    """
    span = max(length - 1, 1)
    mags = np.geomspace(min_total, max_total, n_rates) / span
    return np.concatenate([-mags[::-1], mags])


def _exp_lsq(u: np.ndarray, y: np.ndarray, rate: float):
    """Best (amplitude, offset, sse) for a fixed rate."""
    e = np.exp(rate * u)
    e_mean, y_mean = e.mean(), y.mean()
    de = e - e_mean
    denom = float(de @ de)
    if denom == 0.0:
        return 0.0, float(y_mean), float(((y - y_mean) ** 2).sum())
    amplitude = float(de @ (y - y_mean)) / denom
    offset = float(y_mean - amplitude * e_mean)
    sse = float(((y - amplitude * e - offset) ** 2).sum())
    return amplitude, offset, sse


def fit_exponential_window(
    data: Trajectory,
    rates: np.ndarray | None = None,
    refine: bool = True,
) -> WindowModel:
    """``a * exp(b * u) + c`` trend by grid search on ``b``, exponential scale.

    For each candidate rate the amplitude and offset have a closed-form least
    squares solution. The best grid rate is optionally polished by a bounded
    scalar search between its neighbours and kept only if it lowers the SSE.
    """
    u, y, floor = _prepare(data)
    rates = rate_grid(y.size) if rates is None else np.sort(np.asarray(rates, dtype=float))

    e = np.exp(np.outer(rates, u))
    de = e - e.mean(axis=1, keepdims=True)
    yc = y - y.mean()
    denom = np.einsum("ij,ij->i", de, de)
    amp = np.where(denom > 0, de @ yc / np.where(denom > 0, denom, 1.0), 0.0)
    sse = np.einsum("ij,ij->i", yc - amp[:, None] * de, yc - amp[:, None] * de)
    best = int(np.argmin(sse))
    rate = float(rates[best])
    amplitude, offset, best_sse = _exp_lsq(u, y, rate)

    if refine and 0 < best < rates.size - 1:
        res = minimize_scalar(
            lambda b: _exp_lsq(u, y, b)[2],
            bounds=(float(rates[best - 1]), float(rates[best + 1])),
            method="bounded",
            options={"xatol": 1e-12},
        )
        a2, c2, sse2 = _exp_lsq(u, y, float(res.x))
        if sse2 < best_sse:
            rate, amplitude, offset = float(res.x), a2, c2

    resid = y - (amplitude * np.exp(rate * u) + offset)
    abs_r = np.abs(resid)
    if np.count_nonzero(abs_r > floor) < 2:
        s_amp, s_rate = floor, 0.0
    else:
        # log|r| regression gives the growth rate; the level comes from matching
        # the residual second moment (3 trend parameters used up)
        s_rate, _ = _line_fit(u, np.log(np.maximum(abs_r, floor)))
        s_amp = math.sqrt(float(np.sum(resid**2 * np.exp(-2 * s_rate * u))) / (y.size - 3))

    return WindowModel(
        kind="exponential",
        origin=data.start,
        trend_params={"amplitude": amplitude, "rate": rate, "offset": offset},
        scale_params={"amplitude": s_amp, "rate": s_rate},
        scale_floor=floor,
        window=data.window,
    )


def fit_window(data: Trajectory, kind: str) -> WindowModel:
    if kind == "linear":
        return fit_linear_window(data)
    if kind == "exponential":
        return fit_exponential_window(data)
    raise ValueError(f"unknown window model kind {kind!r}")


def simulate_from_window_model(
    model: WindowModel,
    window,
    n: int,
    seed: int,
    *,
    stream: int = 0,
) -> PrognosisEnsemble:
    """Ensemble of ``trend + scale * Z`` on ``window``; member i seeded by (seed, stream, i)."""
    if n < 2:
        raise ValueError(f"ensemble size must be >= 2, got {n}")
    start, end = (int(w) for w in window)
    t = np.arange(start, end + 1)
    trend = model.trend(t)
    scale = model.scale(t)
    if np.all(scale <= model.scale_floor):
        scale = np.zeros_like(scale)
    rows = np.empty((n, t.size))
    for i in range(n):
        z = np.random.default_rng(child_seed(seed, stream, i)).standard_normal(t.size)
        rows[i] = trend + scale * z
    return PrognosisEnsemble((start, end), rows)
