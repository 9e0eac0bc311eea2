"""Picard iteration for Lipschitz initial value problems, contraction iteration,
and equilibria of vector fields.

The integral operator ``(Phi x)(t) = s0 + int_0^t F(x(tau)) dtau`` is a
contraction on windows of length ``T`` with ``L*T < 1``; solutions on long
horizons are obtained by chaining windows, each starting from the previous
window's endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import SampledTrajectory, StateVector

ArrayFn = Callable[[np.ndarray], np.ndarray]

# gaps below this are rounding noise and never used for contraction ratios
_GAP_FLOOR = 1e-13


class PicardDivergence(RuntimeError):
    def __init__(self, message: str, residual: float, gaps: list[float]):
        super().__init__(message)
        self.residual = residual
        self.gaps = gaps


class LipschitzViolation(RuntimeError):
    """Successive Picard iterates moved apart: the declared bound L is wrong."""


class FixedPointDivergence(RuntimeError):
    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = trace


class NewtonFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class VectorField:
    """Autonomous field ``F``; ``f`` maps a coordinate array of shape (d,) to (d,).

    With ``vectorized=True`` the function also accepts an (m, d) batch.
    """

    f: ArrayFn
    lipschitz_bound: float
    dim: int = 1
    vectorized: bool = False

    def __post_init__(self):
        if self.lipschitz_bound < 0 or not math.isfinite(self.lipschitz_bound):
            raise ValueError("lipschitz_bound must be a finite non-negative number")

    def __call__(self, s: StateVector) -> StateVector:
        return StateVector.from_array(self.f(s.as_array()))

    def evaluate(self, x) -> np.ndarray:
        return np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float).reshape(-1)

    def batch(self, xs: np.ndarray) -> np.ndarray:
        if self.vectorized:
            return np.asarray(self.f(xs), dtype=float).reshape(xs.shape)
        return np.array([self.evaluate(row) for row in xs]).reshape(xs.shape)


@dataclass(frozen=True)
class PicardConfig:
    grid_step: float = 1e-3
    fixed_point_tol: float = 1e-10
    max_iterations: int = 200
    window_factor: float = 0.5

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        if not self.fixed_point_tol > 0:
            raise ValueError("fixed_point_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 < self.window_factor < 1:
            raise ValueError("window_factor must lie in (0, 1)")


@dataclass(frozen=True)
class WindowResult:
    values: np.ndarray
    iterations: int
    gaps: list[float]
    residual: float

    @property
    def ratios(self) -> list[float]:
        return [b / a for a, b in zip(self.gaps, self.gaps[1:]) if a > _GAP_FLOOR]


@dataclass(frozen=True)
class SolutionCurve:
    trajectory: SampledTrajectory
    residual: float
    iterations_used: int
    contraction_ratios: list[float] = field(default_factory=list)
    window_iterations: list[int] = field(default_factory=list)
    contraction_constant: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array(self.trajectory.times)

    @property
    def values(self) -> np.ndarray:
        return self.trajectory.as_array()


def _cumtrapz(fx: np.ndarray, times: np.ndarray) -> np.ndarray:
    dt = np.diff(times)[:, None]
    out = np.zeros_like(fx)
    out[1:] = np.cumsum(0.5 * dt * (fx[1:] + fx[:-1]), axis=0)
    return out


def _sup_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(a - b, axis=1)))


def picard_operator(field: VectorField, s0: np.ndarray, times: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One application of the integral operator on a window grid (trapezoid rule)."""
    return s0[None, :] + _cumtrapz(field.batch(x), times)


def picard_window(
    field: VectorField,
    s0,
    times: Sequence[float],
    tol: float,
    max_iterations: int,
    initial: np.ndarray | None = None,
) -> WindowResult:
    """Iterate the integral operator on one window until successive iterates agree to ``tol``.

    ``times`` must start at 0. ``initial`` defaults to the constant curve s0.
    """
    times = np.asarray(times, dtype=float)
    s0 = np.asarray(s0, dtype=float).reshape(-1)
    x = np.tile(s0, (len(times), 1)) if initial is None else np.array(initial, dtype=float)
    gaps: list[float] = []
    for n in range(1, max_iterations + 1):
        x_new = picard_operator(field, s0, times, x)
        gap = _sup_gap(x_new, x)
        if not math.isfinite(gap):
            raise LipschitzViolation("iterates became non-finite")
        if gaps and gaps[-1] > _GAP_FLOOR and gap > gaps[-1] * (1 + 1e-9):
            raise LipschitzViolation(
                f"iterate gap grew from {gaps[-1]:.3e} to {gap:.3e}; "
                f"declared L={field.lipschitz_bound} does not bound the field"
            )
        gaps.append(gap)
        x = x_new
        if gap <= tol:
            residual = _sup_gap(picard_operator(field, s0, times, x), x)
            return WindowResult(x, n, gaps, residual)
    raise PicardDivergence(
        f"no convergence in {max_iterations} iterations (last gap {gaps[-1]:.3e})",
        residual=gaps[-1],
        gaps=gaps,
    )


def _window_grid(length: float, step: float) -> np.ndarray:
    m = max(1, math.ceil(length / step - 1e-9))
    return np.linspace(0.0, length, m + 1)


def solve_ivp_picard(field: VectorField, s0: StateVector, horizon: float, cfg: PicardConfig | None = None) -> SolutionCurve:
    """Solve x' = F(x), x(0) = s0 on [0, horizon] by chained Picard windows."""
    cfg = cfg or PicardConfig()
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if s0.dim != field.dim:
        raise ValueError(f"field has dim {field.dim}, initial state has dim {s0.dim}")
    L = field.lipschitz_bound
    x0 = s0.as_array()

    if L == 0:
        # constant field: the solution is affine and exact
        times = _window_grid(horizon, cfg.grid_step)
        values = x0[None, :] + times[:, None] * field.evaluate(x0)[None, :]
        traj = SampledTrajectory(tuple(times), tuple(StateVector.from_array(v) for v in values))
        return SolutionCurve(traj, 0.0, 1, [], [1], 0.0)

    window = cfg.window_factor / L
    n_windows = max(1, math.ceil(horizon / window - 1e-12))
    all_times, all_values = [np.array([0.0])], [x0[None, :]]
    ratios: list[float] = []
    per_window: list[int] = []
    residual = 0.0
    state = x0
    for k in range(n_windows):
        start = k * window
        stop = horizon if k == n_windows - 1 else (k + 1) * window
        local = _window_grid(stop - start, cfg.grid_step)
        res = picard_window(field, state, local, cfg.fixed_point_tol, cfg.max_iterations)
        all_times.append(start + local[1:])
        all_values.append(res.values[1:])
        ratios.extend(res.ratios)
        per_window.append(res.iterations)
        residual = max(residual, res.residual)
        state = res.values[-1]
    times = np.concatenate(all_times)
    values = np.concatenate(all_values)
    traj = SampledTrajectory(tuple(times), tuple(StateVector.from_array(v) for v in values))
    return SolutionCurve(traj, residual, sum(per_window), ratios, per_window, L * window)


def rk4_reference(field: VectorField, s0, times: Sequence[float]) -> np.ndarray:
    """Classical fourth-order Runge-Kutta on the given grid (oracle and warm start)."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(s0, dtype=float).reshape(-1)
    out = np.empty((len(times), x.size))
    out[0] = x
    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        k1 = field.evaluate(x)
        k2 = field.evaluate(x + 0.5 * h * k1)
        k3 = field.evaluate(x + 0.5 * h * k2)
        k4 = field.evaluate(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i] = x
    return out


class FixedPointResult(NamedTuple):
    fixed_point: object
    iterate_count: int
    trace: list[float]


def iterate_to_fixed_point(map_fn: Callable, x0, tol: float = 1e-12, max_iter: int = 10_000) -> FixedPointResult:
    """Iterate ``x <- map_fn(x)`` until two successive iterates are within ``tol``.

    Works on floats, numpy arrays or StateVectors; the result has the input's type.
    The returned point is the last iterate, so ``iterate_count`` is 0 when x0 is
    already fixed.
    """
    as_state = isinstance(x0, StateVector)
    x = x0
    trace: list[float] = []
    for k in range(max_iter + 1):
        y = map_fn(x)
        if as_state:
            gap = float(np.linalg.norm(y.as_array() - x.as_array()))
        else:
            gap = float(np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(x, dtype=float)))
        trace.append(gap)
        if gap <= tol:
            return FixedPointResult(y, k, trace)
        x = y
    raise FixedPointDivergence(f"no fixed point within {max_iter} iterations (last gap {trace[-1]:.3e})", trace)


def jacobian(field: VectorField, x: np.ndarray, fd_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian; the step is scaled by each coordinate's magnitude."""
    x = np.asarray(x, dtype=float)
    J = np.empty((x.size, x.size))
    for j in range(x.size):
        h = fd_step * max(1.0, abs(x[j]))
        e = np.zeros_like(x)
        e[j] = h
        J[:, j] = (field.evaluate(x + e) - field.evaluate(x - e)) / (2 * h)
    return J


def find_equilibrium(
    field: VectorField,
    guess: StateVector,
    tol: float = 1e-10,
    max_iter: int = 100,
    fd_step: float = 1e-6,
) -> StateVector:
    """Damped Newton on F(s) = 0 with a finite-difference Jacobian."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = guess.as_array()
    fx = field.evaluate(x)
    res = float(np.linalg.norm(fx))
    for _ in range(max_iter):
        if res <= tol:
            return StateVector.from_array(x)
        step = np.linalg.lstsq(jacobian(field, x, fd_step), -fx, rcond=None)[0]
        lam = 1.0
        for _ in range(40):
            trial = x + lam * step
            f_trial = field.evaluate(trial)
            r_trial = float(np.linalg.norm(f_trial))
            if r_trial < res:
                break
            lam *= 0.5
        else:
            raise NewtonFailure(f"Newton stagnated at |F| = {res:.3e}")
        x, fx, res = trial, f_trial, r_trial
    if res <= tol:
        return StateVector.from_array(x)
    raise NewtonFailure(f"Newton did not reach tol {tol:g} in {max_iter} steps (|F| = {res:.3e})")


@dataclass(frozen=True)
class StabilityReport:
    kind: str  # asymptotically_stable | unstable | marginal
    eigenvalues: list[complex]


def classify_stability(field: VectorField, equilibrium: StateVector, fd_step: float = 1e-6, tol: float = 1e-8) -> StabilityReport:
    x = equilibrium.as_array()
    if np.linalg.norm(field.evaluate(x)) > 1e-6:
        raise ValueError("point is not an equilibrium (|F| > 1e-6)")
    try:
        eig = np.linalg.eigvals(jacobian(field, x, fd_step))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise RuntimeError(f"eigenvalue computation failed: {exc}") from exc
    re = eig.real
    if np.all(re < -tol):
        kind = "asymptotically_stable"
    elif np.any(re > tol):
        kind = "unstable"
    else:
        kind = "marginal"
    return StabilityReport(kind, [complex(v) for v in eig])
