"""End-to-end assessment of an observed HI series with user-supplied regime boundaries."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .assessment import DEFAULT_THETA_GRID, AssessmentReport, MetricConfig, assess_all
from .calibration import split_window
from .errors import ConfigError
from .estimation import WindowModel, fit_window, simulate_from_window_model
from .io import check_boundaries, read_hi_csv
from .metrics import ALL_METRICS, MetricKind
from .series import Trajectory

_DEFAULT_KIND = {"second": "linear", "third": "exponential"}


@dataclass
class RealDataRun:
    data: Path
    boundaries: tuple[int, int, int]
    regime: str = "second"
    split: float = 0.8
    fit_on: str = "regime"  # "regime" | "train"
    assess_on: str = "test"  # "test" | "regime"
    model_kind: str | None = None
    n_prognoses: int = 1000
    seed: int = 0
    metrics: tuple[MetricKind, ...] = ALL_METRICS
    theta_grid: tuple[float, ...] = DEFAULT_THETA_GRID
    metric_config: MetricConfig = field(default_factory=MetricConfig)

    def __post_init__(self):
        if self.regime not in _DEFAULT_KIND:
            raise ConfigError(f"regime must be 'second' or 'third', got {self.regime!r}")
        if self.fit_on not in ("regime", "train"):
            raise ConfigError(f"fit_on must be 'regime' or 'train', got {self.fit_on!r}")
        if self.assess_on not in ("test", "regime"):
            raise ConfigError(f"assess_on must be 'test' or 'regime', got {self.assess_on!r}")


def regime_range(boundaries: Sequence[int], regime: str) -> tuple[int, int]:
    b1, b2, b3 = boundaries
    if regime == "second":
        return (b1 + 1, b2)
    if regime == "third":
        return (b2 + 1, b3)
    raise ConfigError(f"regime must be 'second' or 'third', got {regime!r}")


def windows(run: RealDataRun, data: Trajectory):
    """(fit window, assessment window) for a run."""
    bounds = check_boundaries(run.boundaries, data)
    regime = regime_range(bounds, run.regime)
    if run.fit_on == "regime" and run.assess_on == "regime":
        return regime, regime
    train, test = split_window(regime, run.split)
    fit = regime if run.fit_on == "regime" else train
    target = test if run.assess_on == "test" else regime
    return fit, target


def estimate(run: RealDataRun, data: Trajectory | None = None) -> WindowModel:
    data = data if data is not None else read_hi_csv(run.data)
    fit, _ = windows(run, data)
    return fit_window(data.slice(*fit), run.model_kind or _DEFAULT_KIND[run.regime])


def run_real_data(run: RealDataRun, model: WindowModel | None = None) -> list[AssessmentReport]:
    data = read_hi_csv(run.data)
    _, target = windows(run, data)
    model = model or estimate(run, data)
    ensemble = simulate_from_window_model(model, target, run.n_prognoses, run.seed)
    meta = {
        "seed": run.seed,
        "regime": run.regime,
        "boundaries": list(run.boundaries),
        "model_kind": model.kind,
        "data": Path(run.data).name,
    }
    return assess_all(
        ensemble, data.slice(*target), run.metrics, run.theta_grid, run.metric_config, meta
    )
