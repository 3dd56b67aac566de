"""Containers for health-index series and prognosis ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Trajectory:
    """A health-index series sampled at integer indices ``start, start+1, ...``."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("trajectory values must be one-dimensional")
        if values.size == 0:
            raise ValueError("trajectory is empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("trajectory contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> int:
        return self.start + self.values.size - 1

    @property
    def window(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    def slice(self, start: int, end: int) -> Trajectory:
        """Sub-series on the inclusive index range [start, end]."""
        if start < self.start or end > self.end or start > end:
            raise ValueError(
                f"window [{start}, {end}] not inside data range [{self.start}, {self.end}]"
            )
        return Trajectory(start, self.values[start - self.start : end - self.start + 1])


@dataclass(frozen=True)
class PrognosisEnsemble:
    """n prognosed trajectories over the common prediction window ``[start, end]``.

    ``trajectories`` has shape (n, end - start + 1).
    """

    window: tuple[int, int]
    trajectories: np.ndarray

    def __post_init__(self):
        start, end = (int(w) for w in self.window)
        data = np.array(self.trajectories, dtype=float)
        if data.ndim != 2:
            raise ValueError("ensemble must be a 2-D array (n, window length)")
        if data.shape[0] < 2:
            raise ValueError(f"ensemble needs at least 2 trajectories, got {data.shape[0]}")
        if data.shape[1] != end - start + 1:
            raise ValueError(
                f"trajectory length {data.shape[1]} does not match window [{start}, {end}]"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("ensemble contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "window", (start, end))
        object.__setattr__(self, "trajectories", data)

    @property
    def n(self) -> int:
        return self.trajectories.shape[0]

    def __len__(self) -> int:
        return self.n

    @property
    def length(self) -> int:
        return self.trajectories.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.window[0], self.window[1] + 1)

    def member(self, i: int) -> Trajectory:
        return Trajectory(self.window[0], self.trajectories[i])
