"""States, sampled trajectories, flows and observables shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when states of different dimension are combined."""


@dataclass(frozen=True)
class StateVector:
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) == 0:
            raise ValueError("a state needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values: float) -> "StateVector":
        return cls(tuple(values))

    @classmethod
    def from_array(cls, arr) -> "StateVector":
        return cls(tuple(np.asarray(arr, dtype=float).ravel()))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def __len__(self) -> int:
        return len(self.coords)


def euclidean(a: StateVector, b: StateVector) -> float:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a.coords, b.coords)))


def wrap_gap(a: float, b: float) -> float:
    """Distance between two points of R/Z, in turns."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def periodic(a: StateVector, b: StateVector) -> float:
    """Euclidean combination of per-coordinate wrap-around gaps (circle, torus)."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return math.sqrt(sum(wrap_gap(x, y) ** 2 for x, y in zip(a.coords, b.coords)))


Metric = Callable[[StateVector, StateVector], float]


@dataclass(frozen=True)
class SampledTrajectory:
    times: tuple[float, ...]
    states: tuple[StateVector, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        states = tuple(self.states)
        if len(times) == 0 or len(times) != len(states):
            raise ValueError("times and states must be non-empty and of equal length")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionError(f"states of mixed dimension {sorted(dims)}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def as_array(self) -> np.ndarray:
        return np.array([s.coords for s in self.states])

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class FlowSpec:
    """A flow ``evolve(t, s)``; ``metric`` is used when comparing evolved states."""

    evolve: Callable[[float, StateVector], StateVector]
    domain_dim: int
    metric: Metric = field(default=euclidean)

    def __call__(self, t: float, s: StateVector) -> StateVector:
        if s.dim != self.domain_dim:
            raise DimensionError(f"flow acts on dim {self.domain_dim}, got {s.dim}")
        return self.evolve(t, s)


@dataclass(frozen=True)
class Observable:
    apply: Callable[[StateVector], float]
    name: str = "observable"

    def __call__(self, s: StateVector) -> float:
        return float(self.apply(s))


def _check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(t) for t in grid)
    if not grid:
        raise ValueError("empty time grid")
    if any(t1 <= t0 for t0, t1 in zip(grid, grid[1:])):
        raise ValueError("time grid must be strictly increasing")
    return grid


def sample_flow(flow: FlowSpec, s0: StateVector, grid: Sequence[float]) -> SampledTrajectory:
    grid = _check_grid(grid)
    if s0.dim != flow.domain_dim:
        raise DimensionError(f"flow acts on dim {flow.domain_dim}, got {s0.dim}")
    return SampledTrajectory(grid, tuple(flow(t, s0) for t in grid))


@dataclass(frozen=True)
class SemigroupReport:
    max_violation: float
    tol: float
    worst: tuple[StateVector, float, float] | None

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def check_semigroup(
    flow: FlowSpec,
    s_samples: Iterable[StateVector],
    t_pairs: Iterable[tuple[float, float]],
    tol: float = 1e-12,
) -> SemigroupReport:
    """Largest gap between evolve(t+s, x) and evolve(t, evolve(s, x)) over the samples."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    pairs = list(t_pairs)
    worst, worst_at = 0.0, None
    for x in s_samples:
        for t, s in pairs:
            gap = flow.metric(flow(t + s, x), flow(t, flow(s, x)))
            if worst_at is None or gap > worst:
                worst, worst_at = gap, (x, t, s)
    return SemigroupReport(worst, tol, worst_at)
