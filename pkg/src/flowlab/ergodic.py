"""Invariant densities, transfer operator, Birkhoff averages, correlation decay
and recurrence statistics for the model systems in :mod:`flowlab.maps`.

Observables passed to the ensemble routines act elementwise on numpy arrays
(a scalar return value is broadcast, so constants work too). Torus observables
receive an array whose last axis is (x, y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .maps import GOLDEN, cat_step_array, frac_product, logistic_preimages

ArrayFn = Callable[[np.ndarray], np.ndarray]


# --------------------------------------------------------------------------- arcsine law
def arcsine_density(x: float) -> float:
    """Invariant density 1 / (pi sqrt(x (1 - x))) of the logistic map."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"arcsine density is unbounded at and undefined beyond the endpoints (x={x})")
    return 1.0 / (math.pi * math.sqrt(x * (1.0 - x)))


def arcsine_cdf(x):
    return 2.0 / np.pi * np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0)))


def sample_arcsine(rng: np.random.Generator, n: int) -> np.ndarray:
    """Exact draws from the logistic acim by inverse CDF, x = sin^2(pi u / 2)."""
    return np.sin(0.5 * np.pi * rng.random(n)) ** 2


def sample_torus(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.random((n, 2))


def sample_circle(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.random(n)


# --------------------------------------------------------------------------- transfer operator
def transfer_apply(phi: Callable[[float], float], x: float) -> float:
    """Perron-Frobenius operator of T(x) = 4x(1-x) applied to phi, evaluated at x."""
    if not 0.0 < x < 1.0:
        raise ValueError("transfer operator is evaluated on the open interval (0, 1)")
    y_minus, y_plus = logistic_preimages(x)
    jac = 4.0 * math.sqrt(1.0 - x)  # |T'(y)| = |4 - 8y| at both preimages
    return phi(y_minus) / jac + phi(y_plus) / jac


# --------------------------------------------------------------------------- Ulam's method
@dataclass(frozen=True)
class UlamPartition:
    n_bins: int
    interval: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError("a partition needs at least two bins")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.interval[0], self.interval[1], self.n_bins + 1)

    @property
    def width(self) -> float:
        return (self.interval[1] - self.interval[0]) / self.n_bins

    def locate(self, x: np.ndarray) -> np.ndarray:
        a, _ = self.interval
        idx = np.floor((np.asarray(x) - a) / self.width).astype(np.int64)
        return np.clip(idx, 0, self.n_bins - 1)


@dataclass(frozen=True)
class EmpiricalDensity:
    bin_masses: np.ndarray
    partition: UlamPartition
    seed: int | None = None
    sweeps: int = 0

    def __post_init__(self):
        if abs(float(np.sum(self.bin_masses)) - 1.0) > 1e-12:
            raise ValueError("bin masses must sum to 1")

    @property
    def density(self) -> np.ndarray:
        return self.bin_masses / self.partition.width

    def l1_distance(self, cdf: Callable[[np.ndarray], np.ndarray] = arcsine_cdf) -> float:
        """L1 distance between the piecewise-constant density and the law with this CDF."""
        exact = np.diff(cdf(self.partition.edges))
        return float(np.sum(np.abs(self.bin_masses - exact)))


_MAPS: dict[str, ArrayFn] = {"logistic": lambda x: 4.0 * x * (1.0 - x)}


def ulam_matrix(
    map_name: str | ArrayFn,
    partition: UlamPartition,
    samples_per_bin: int,
    seed: int = 0,
) -> sparse.csr_matrix:
    """Row-stochastic bin-to-bin transition matrix from stratified samples.

    Sample j of bin i sits at a uniform random position inside the j-th of
    ``samples_per_bin`` equal sub-cells of bin i.
    """
    if samples_per_bin < 100:
        raise ValueError("samples_per_bin must be at least 100")
    fn = _MAPS[map_name] if isinstance(map_name, str) else map_name
    rng = np.random.default_rng(seed)
    n, s = partition.n_bins, samples_per_bin
    offsets = (np.arange(s)[None, :] + rng.random((n, s))) / s
    x = partition.interval[0] + (np.arange(n)[:, None] + offsets) * partition.width
    rows = np.repeat(np.arange(n), s)
    cols = partition.locate(fn(x.ravel()))
    P = sparse.csr_matrix((np.full(rows.size, 1.0 / s), (rows, cols)), shape=(n, n))
    P.sum_duplicates()
    return P


def stationary_distribution(P: sparse.spmatrix, tol: float = 1e-12, max_sweeps: int = 10**5) -> tuple[np.ndarray, int]:
    """Left fixed vector of a row-stochastic matrix by power iteration."""
    n = P.shape[0]
    PT = P.T.tocsr()
    pi = np.full(n, 1.0 / n)
    for sweep in range(1, max_sweeps + 1):
        nxt = PT @ pi
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt, sweep
        pi = nxt
    raise RuntimeError(f"power iteration did not converge in {max_sweeps} sweeps")


def ulam_invariant_density(
    map_name: str | ArrayFn = "logistic",
    partition: UlamPartition | None = None,
    samples_per_bin: int = 1000,
    seed: int = 0,
) -> EmpiricalDensity:
    partition = partition or UlamPartition(2048)
    P = ulam_matrix(map_name, partition, samples_per_bin, seed)
    pi, sweeps = stationary_distribution(P)
    pi = np.clip(pi, 0.0, None)
    return EmpiricalDensity(pi / pi.sum(), partition, seed, sweeps)


# --------------------------------------------------------------------------- time averages
def _apply(obs: ArrayFn, x: np.ndarray, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(obs(x), dtype=float), shape)


def orbit(system: str | ArrayFn, x0, n: int, theta: float = GOLDEN) -> np.ndarray:
    """Orbit points x_0, ..., x_{n-1} of one start."""
    if system == "rotation":
        return np.mod(float(x0) + frac_product(np.arange(n, dtype=float), theta), 1.0)
    if system == "logistic":
        out = [0.0] * n
        x = float(x0)
        for k in range(n):
            out[k] = x
            x = 4.0 * x * (1.0 - x)
        return np.array(out)
    if system == "cat":
        pts = np.empty((n, 2))
        p = np.asarray(x0, dtype=float)
        for k in range(n):
            pts[k] = p
            p = cat_step_array(p)
        return pts
    if callable(system):
        pts = [x0]
        for _ in range(n - 1):
            pts.append(system(pts[-1]))
        return np.array(pts, dtype=float)
    raise ValueError(f"unknown system {system!r}")


def birkhoff_average(system: str | ArrayFn, observable: ArrayFn, x0, n: int, theta: float = GOLDEN) -> float:
    """(1/n) sum_{k<n} observable(x_k), summed with math.fsum."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = orbit(system, x0, n, theta)
    vals = _apply(observable, pts, (pts.shape[0],))
    return math.fsum(vals.tolist()) / n


# --------------------------------------------------------------------------- Hölder norm
def holder_norm(phi: ArrayFn, beta: float, grid: Sequence[float]) -> float:
    """Grid lower bound for sup |phi(x) - phi(y)| / |x - y|^beta + sup |phi|."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    x = np.unique(np.asarray(grid, dtype=float))
    if x.size < 2:
        raise ValueError("grid needs at least two distinct points")
    v = _apply(phi, x, x.shape)
    i, j = np.triu_indices(x.size, k=1)
    quotient = np.abs(v[i] - v[j]) / np.abs(x[i] - x[j]) ** beta
    return float(quotient.max() + np.abs(v).max())


# --------------------------------------------------------------------------- correlations
@dataclass(frozen=True)
class CorrelationSeries:
    values: np.ndarray
    stderr: np.ndarray
    fitted_rho: float | None
    fitted_C: float | None
    fitted_lags: list[int] = field(default_factory=list)
    ensemble: int = 0
    seed: int | None = None

    def noise_floor(self, k: float = 3.0) -> np.ndarray:
        return k * self.stderr


_STEPS: dict[str, ArrayFn] = {
    "logistic": lambda x: 4.0 * x * (1.0 - x),
    "cat": cat_step_array,
}
_SAMPLERS = {"logistic": sample_arcsine, "cat": sample_torus}


def fit_exponential(values: np.ndarray, stderr: np.ndarray, min_points: int = 5, k: float = 3.0):
    """Least-squares fit of ln|C_n| = ln C + n ln rho over lags above k standard errors."""
    lags = [n for n in range(len(values)) if abs(values[n]) > k * stderr[n] and values[n] != 0]
    if len(lags) < min_points:
        return None, None, lags
    slope, icept = np.polyfit(lags, np.log(np.abs(values[lags])), 1)
    return float(math.exp(slope)), float(math.exp(icept)), lags


def correlation_decay(
    system: str,
    phi: ArrayFn,
    psi: ArrayFn,
    n_max: int,
    ensemble: int = 10**6,
    seed: int = 0,
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None,
) -> CorrelationSeries:
    """Monte-Carlo estimate of C_n = E[phi(T^n X) psi(X)] - E[phi] E[psi], n = 0..n_max,
    with X drawn from the invariant measure."""
    step = _STEPS[system]
    sampler = sampler or _SAMPLERS[system]
    rng = np.random.default_rng(seed)
    x0 = sampler(rng, ensemble)
    lead = (ensemble,)
    psi0 = _apply(psi, x0, lead)
    psi_c = psi0 - psi0.mean()
    vals, errs = np.empty(n_max + 1), np.empty(n_max + 1)
    x = x0
    for n in range(n_max + 1):
        if n:
            x = step(x)
        phin = _apply(phi, x, lead)
        prod = (phin - phin.mean()) * psi_c
        vals[n] = prod.mean()
        errs[n] = prod.std(ddof=1) / math.sqrt(ensemble)
    rho, C, lags = fit_exponential(vals, errs)
    return CorrelationSeries(vals, errs, rho, C, lags, ensemble, seed)


# --------------------------------------------------------------------------- recurrence
@dataclass(frozen=True)
class RecurrenceReport:
    epsilon: float
    n_max: int
    fraction_recurrent: float
    mean_first_return: float
    samples: int
    first_returns: list[int | None] = field(default_factory=list)


def _circle_gap(a, b):
    d = np.mod(np.abs(a - b), 1.0)
    return np.minimum(d, 1.0 - d)


def _torus_gap(a, b):
    return np.hypot(_circle_gap(a[..., 0], b[..., 0]), _circle_gap(a[..., 1], b[..., 1]))


def _line_gap(a, b):
    return np.abs(a - b)


@dataclass(frozen=True)
class _Dynamics:
    step: ArrayFn
    gap: Callable[[np.ndarray, np.ndarray], np.ndarray]
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    at_time: Callable[[np.ndarray, int], np.ndarray] | None = None


def dynamics(system: str, theta: float = GOLDEN) -> _Dynamics:
    if system == "rotation":
        return _Dynamics(
            step=lambda x: np.mod(x + theta, 1.0),
            gap=_circle_gap,
            sampler=sample_circle,
            at_time=lambda x0, n: np.mod(x0 + frac_product(float(n), theta), 1.0),
        )
    if system == "identity":
        return _Dynamics(step=lambda x: x, gap=_line_gap, sampler=lambda rng, n: rng.random(n))
    if system == "logistic":
        return _Dynamics(step=_STEPS["logistic"], gap=_line_gap, sampler=sample_arcsine)
    if system == "cat":
        return _Dynamics(step=cat_step_array, gap=_torus_gap, sampler=sample_torus)
    raise ValueError(f"unknown system {system!r}")


def first_returns(dyn: _Dynamics, starts: np.ndarray, hit: Callable[[np.ndarray], np.ndarray], n_max: int) -> np.ndarray:
    """First integer time 1..n_max at which ``hit`` is true, or 0 if none."""
    first = np.zeros(len(starts), dtype=np.int64)
    x = starts
    for n in range(1, n_max + 1):
        x = dyn.at_time(starts, n) if dyn.at_time else dyn.step(x)
        new = (first == 0) & hit(x)
        first[new] = n
        if np.all(first):
            break
    return first


def recurrence_statistics(
    system: str,
    epsilon: float,
    n_max: int,
    samples: int,
    seed: int = 0,
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None,
    theta: float = GOLDEN,
) -> RecurrenceReport:
    """Scan iterates 1..n_max of each sampled start for its first return within ``epsilon``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    dyn = dynamics(system, theta)
    rng = np.random.default_rng(seed)
    starts = (sampler or dyn.sampler)(rng, samples)
    first = first_returns(dyn, starts, lambda x: dyn.gap(x, starts) < epsilon, n_max)
    returned = first[first > 0]
    mean = float(returned.mean()) if returned.size else math.nan
    return RecurrenceReport(
        epsilon,
        n_max,
        returned.size / samples,
        mean,
        samples,
        [int(v) if v else None for v in first],
    )


def mean_return_to_interval(
    system: str,
    interval: tuple[float, float],
    samples: int,
    n_max: int = 10**4,
    seed: int = 0,
    theta: float = GOLDEN,
) -> float:
    """Mean first return time to an interval for starts drawn uniformly inside it.

    For the rotation this is the conditional invariant measure, so the value
    can be compared with the reciprocal of the interval length (Kac).
    """
    if system != "rotation":
        raise ValueError("only the rotation has uniform conditional measure on intervals")
    a, b = interval
    dyn = dynamics(system, theta)
    rng = np.random.default_rng(seed)
    starts = a + (b - a) * rng.random(samples)
    first = first_returns(dyn, starts, lambda x: (x >= a) & (x < b), n_max)
    if np.any(first == 0):
        raise RuntimeError("some starts did not return within n_max")
    return float(first.mean())
