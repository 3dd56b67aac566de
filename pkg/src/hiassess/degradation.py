"""Three-regime health-index degradation model with Gaussian noise.

The series is ``S(t) = D(t) + SC(t) * Z(t)`` for ``t = 1..m`` with ``Z`` iid
standard normal. Regime 1 (``t <= t1_star``) has a flat trend and a slowly
changing linear scale; regime 2 (``t1_star < t <= t2_star``) has linear trend
and scale; regime 3 (``t > t2_star``) has exponential trend and scale. The
piecewise constants follow from the four scale anchors ``sigma1..sigma4`` at
``t = 1, t1_star, t2_star, m`` and from continuity of the trend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParametersError, OutOfRangeError
from .series import PrognosisEnsemble, Trajectory


@dataclass(frozen=True)
class DegradationParams:
    t1_star: int
    t2_star: int
    m: int
    sigma1: float
    sigma2: float
    sigma3: float
    sigma4: float
    c1: float

    def __post_init__(self):
        if not 1 < self.t1_star < self.t2_star < self.m:
            raise InvalidParametersError(
                "need 1 < t1_star < t2_star < m, got "
                f"t1_star={self.t1_star}, t2_star={self.t2_star}, m={self.m}"
            )
        sigmas = (self.sigma1, self.sigma2, self.sigma3, self.sigma4)
        if not all(s > 0 and math.isfinite(s) for s in sigmas):
            raise InvalidParametersError(f"scale anchors must be positive, got {sigmas}")
        if not math.isfinite(self.c1):
            raise InvalidParametersError("c1 must be finite")

    @property
    def sigmas(self) -> tuple[float, float, float, float]:
        return (self.sigma1, self.sigma2, self.sigma3, self.sigma4)

    def regime_bounds(self, regime: int) -> tuple[int, int]:
        """Inclusive index range of regime 1, 2 or 3."""
        bounds = {
            1: (1, self.t1_star),
            2: (self.t1_star + 1, self.t2_star),
            3: (self.t2_star + 1, self.m),
        }
        if regime not in bounds:
            raise ValueError(f"regime must be 1, 2 or 3, got {regime!r}")
        return bounds[regime]


#: Parameter set used for the simulation study (second/third regime tables).
REFERENCE_PARAMS = DegradationParams(
    t1_star=6000, t2_star=9000, m=10000,
    sigma1=1.0, sigma2=2.0, sigma3=7.0, sigma4=25.0, c1=10.0,
)


@dataclass(frozen=True)
class DegradationCoefficients:
    a1: float
    b1: float
    a2: float
    b2: float
    a3: float
    b3: float
    c2: float
    c3: float


def derive_coefficients(params: DegradationParams) -> DegradationCoefficients:
    """Solve the scale anchors and trend continuity for the piecewise constants.

    The regime-2 line is anchored at ``t1_star`` and ``t2_star``; the regime-3
    exponential at ``t2_star`` and ``m``.
    """
    p = params
    # DegradationParams already rejects these; kept for duck-typed callers.
    if p.t1_star <= 1 or p.t2_star <= p.t1_star or p.m <= p.t2_star:
        raise InvalidParametersError("degenerate regime span")
    a1 = (p.sigma2 - p.sigma1) / (p.t1_star - 1)
    b1 = p.sigma1 - a1
    a2 = (p.sigma3 - p.sigma2) / (p.t2_star - p.t1_star)
    b2 = p.sigma2 - a2 * p.t1_star
    b3 = math.log(p.sigma4 / p.sigma3) / (p.m - p.t2_star)
    try:
        a3 = p.sigma3 * math.exp(-b3 * p.t2_star)
    except OverflowError:
        raise InvalidParametersError(
            "regime-3 amplitude a3 overflows; scale decays too fast for this t2_star"
        ) from None
    c2 = p.c1 - a2 * p.t1_star
    # a3 * exp(b3 * t2_star) is sigma3 by construction
    c3 = a2 * p.t2_star + c2 - p.sigma3
    return DegradationCoefficients(a1=a1, b1=b1, a2=a2, b2=b2, a3=a3, b3=b3, c2=c2, c3=c3)


def _check_times(params: DegradationParams, t) -> np.ndarray:
    t = np.asarray(t)
    if np.any(t < 1) or np.any(t > params.m):
        raise OutOfRangeError(f"time index outside [1, {params.m}]")
    return t


def _exp_piece(params: DegradationParams, c: DegradationCoefficients, t: np.ndarray) -> np.ndarray:
    # a3 * exp(b3 * t), written relative to t2_star so neither factor over/underflows
    return params.sigma3 * np.exp(c.b3 * (t - params.t2_star))


def scale_curve(params: DegradationParams, coeffs: DegradationCoefficients, t) -> np.ndarray:
    """Vectorized ``SC(t)`` over an array of integer indices."""
    t = _check_times(params, t).astype(float)
    c = coeffs
    return np.where(
        t <= params.t1_star,
        c.a1 * t + c.b1,
        np.where(t <= params.t2_star, c.a2 * t + c.b2, _exp_piece(params, c, t)),
    )


def trend_curve(params: DegradationParams, coeffs: DegradationCoefficients, t) -> np.ndarray:
    """Vectorized ``D(t)`` over an array of integer indices."""
    t = _check_times(params, t).astype(float)
    c = coeffs
    return np.where(
        t <= params.t1_star,
        params.c1,
        np.where(t <= params.t2_star, c.a2 * t + c.c2, _exp_piece(params, c, t) + c.c3),
    )


def scale_at(params: DegradationParams, coeffs: DegradationCoefficients, t: int) -> float:
    return float(scale_curve(params, coeffs, t))


def trend_at(params: DegradationParams, coeffs: DegradationCoefficients, t: int) -> float:
    return float(trend_curve(params, coeffs, t))


def child_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Seed for one member of a batch, independent of evaluation order."""
    if master_seed < 0:
        raise ValueError("seeds must be non-negative integers")
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))


def _check_window(params: DegradationParams, window) -> tuple[int, int]:
    start, end = (int(w) for w in window)
    if not 1 <= start <= end <= params.m:
        raise OutOfRangeError(f"window [{start}, {end}] outside [1, {params.m}]")
    return start, end


def simulate_trajectory(
    params: DegradationParams,
    coeffs: DegradationCoefficients,
    window,
    seed,
    noise_scale: float = 1.0,
) -> Trajectory:
    """One realization of the model on the inclusive index window.

    Args:
        seed: int or ``np.random.SeedSequence``.
        noise_scale: multiplier on ``SC(t)``; 0 returns the trend exactly.
    """
    start, end = _check_window(params, window)
    t = np.arange(start, end + 1)
    z = np.random.default_rng(seed).standard_normal(t.size)
    values = trend_curve(params, coeffs, t) + (noise_scale * scale_curve(params, coeffs, t)) * z
    return Trajectory(start, values)


def simulate_ensemble(
    params: DegradationParams,
    window,
    n: int,
    master_seed: int,
    *,
    stream: int = 0,
    noise_scale: float = 1.0,
) -> PrognosisEnsemble:
    """n independent trajectories; member i is seeded by ``(master_seed, stream, i)``.

    ``stream`` separates batches drawn from one master seed (e.g. prognoses
    versus test trajectories in a calibration run).
    """
    if n < 2:
        raise ValueError(f"ensemble size must be >= 2, got {n}")
    start, end = _check_window(params, window)
    coeffs = derive_coefficients(params)
    t = np.arange(start, end + 1)
    trend = trend_curve(params, coeffs, t)
    scale = noise_scale * scale_curve(params, coeffs, t)
    rows = np.empty((n, t.size))
    for i in range(n):
        z = np.random.default_rng(child_seed(master_seed, stream, i)).standard_normal(t.size)
        rows[i] = trend + scale * z
    return PrognosisEnsemble((start, end), rows)
