"""Fisher-Rao geometry on the open probability simplex.

Gradients are metric gradients: the Euclidean differential of a divergence
with its index raised by the inverse Fisher metric g^{ij} = p_i d_ij - p_i p_j.
Because every row of g^{ij} sums to zero, the result is automatically tangent
to the simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

BOUNDARY = 1e-9


class SimplexError(ValueError):
    pass


@dataclass(frozen=True)
class SimplexPoint:
    probs: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.probs)
        if len(p) < 2:
            raise SimplexError("a simplex point needs at least two coordinates")
        if min(p) <= BOUNDARY:
            raise SimplexError(f"point is on or within {BOUNDARY:g} of the boundary: {p}")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise SimplexError(f"coordinates sum to {math.fsum(p)!r}, not 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def normalized(cls, values: Sequence[float]) -> "SimplexPoint":
        v = np.asarray(values, dtype=float)
        return cls(tuple(v / v.sum()))

    @classmethod
    def uniform(cls, n: int) -> "SimplexPoint":
        return cls(tuple([1.0 / n] * n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, alpha: float = 1.0) -> "SimplexPoint":
        while True:
            v = rng.dirichlet([alpha] * n)
            if v.min() > 1e-6:
                return cls.normalized(v)

    @property
    def n(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)


@dataclass(frozen=True)
class TangentVector:
    components: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.components)
        if abs(math.fsum(c)) > 1e-10:
            raise SimplexError(f"components sum to {math.fsum(c):.3e}; not tangent to the simplex")
        object.__setattr__(self, "components", c)

    def as_array(self) -> np.ndarray:
        return np.array(self.components)


def _arr(p) -> np.ndarray:
    return p.as_array() if isinstance(p, SimplexPoint) else np.asarray(p, dtype=float)


def _same_dim(p: SimplexPoint, q: SimplexPoint):
    if p.n != q.n:
        raise SimplexError(f"dimension mismatch: {p.n} vs {q.n}")


def fisher_metric(p: SimplexPoint) -> np.ndarray:
    """Diagonal entries 1/p_i of the Fisher metric."""
    return 1.0 / p.as_array()


def inverse_fisher(p: SimplexPoint) -> np.ndarray:
    x = p.as_array()
    return np.diag(x) - np.outer(x, x)


def raise_index(p: SimplexPoint, covector) -> TangentVector:
    x = p.as_array()
    c = np.asarray(covector, dtype=float)
    # g^{ij} c_j = p_i c_i - p_i <p, c>, written out to avoid forming the matrix
    return TangentVector(tuple(x * c - x * np.dot(x, c)))


def kl_divergence(p: SimplexPoint, q: SimplexPoint) -> float:
    _same_dim(p, q)
    x, y = p.as_array(), q.as_array()
    return max(0.0, math.fsum((x * np.log(x / y)).tolist()))


def fisher_gradient_kl(p: SimplexPoint, q: SimplexPoint) -> TangentVector:
    """p_i (1 + log(p_i/q_i)) - p_i sum_k p_k (1 + log(p_k/q_k)).

    The constant 1 contributes p_i (1 - sum_k p_k) = 0 on the simplex and is
    dropped, so the gradient is exactly zero when p == q.
    """
    _same_dim(p, q)
    x, y = p.as_array(), q.as_array()
    ell = np.log(x / y)
    return TangentVector(tuple(x * ell - x * math.fsum((x * ell).tolist())))


@dataclass(frozen=True)
class BregmanPotential:
    phi: Callable[[np.ndarray], float]
    grad_phi: Callable[[np.ndarray], np.ndarray]
    name: str = "potential"

    def divergence(self, p, q) -> float:
        x, y = _arr(p), _arr(q)
        return float(self.phi(x) - self.phi(y) - np.dot(self.grad_phi(y), x - y))

    def looks_strictly_convex(self, rng: np.random.Generator, n: int, trials: int = 200) -> bool:
        for _ in range(trials):
            a, b = rng.dirichlet([1.0] * n), rng.dirichlet([1.0] * n)
            if not self.phi((a + b) / 2) < (self.phi(a) + self.phi(b)) / 2:
                return False
        return True


NEG_ENTROPY = BregmanPotential(
    phi=lambda x: float(np.sum(x * np.log(x))),
    grad_phi=lambda x: 1.0 + np.log(x),
    name="negative entropy",
)

QUADRATIC = BregmanPotential(
    phi=lambda x: 0.5 * float(np.dot(x, x)),
    grad_phi=lambda x: np.asarray(x, dtype=float),
    name="half squared norm",
)


def bregman_gradient(potential: BregmanPotential, p: SimplexPoint, q: SimplexPoint) -> TangentVector:
    """Metric gradient of the Bregman divergence of ``potential`` in its first argument."""
    _same_dim(p, q)
    diff = potential.grad_phi(p.as_array()) - potential.grad_phi(q.as_array())
    return raise_index(p, diff)


def finite_difference_metric_gradient(
    divergence: Callable[[np.ndarray, np.ndarray], float],
    p: SimplexPoint,
    q: SimplexPoint,
    fd_step: float = 1e-5,
) -> TangentVector:
    """Central-difference differential of D(. || q) at p, raised by the inverse metric.

    ``divergence`` is called on raw coordinate arrays, off the simplex, so it
    must extend to the positive orthant (KL and Bregman divergences do).
    """
    _same_dim(p, q)
    x, y = p.as_array(), q.as_array()
    if np.any(x - fd_step <= 0):
        raise SimplexError("finite-difference step pushes a coordinate non-positive")
    dD = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = fd_step
        dD[j] = (divergence(x + e, y) - divergence(x - e, y)) / (2 * fd_step)
    return TangentVector(tuple(inverse_fisher(p) @ dD))


def kl_raw(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(x * np.log(x / y)))


class FlowDidNotConverge(RuntimeError):
    def __init__(self, message: str, path: "FlowPath"):
        super().__init__(message)
        self.path = path


@dataclass
class FlowPath:
    points: list[SimplexPoint] = field(default_factory=list)
    divergences: list[float] = field(default_factory=list)
    step_sizes: list[float] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def strictly_decreasing(self) -> bool:
        d = self.divergences
        return all(b < a for a, b in zip(d, d[1:]))


def gradient_flow(
    p0: SimplexPoint,
    q: SimplexPoint,
    step_size: float = 0.1,
    max_steps: int = 10**4,
    tol: float = 1e-8,
    divergence: Callable[[SimplexPoint, SimplexPoint], float] = kl_divergence,
    gradient: Callable[[SimplexPoint, SimplexPoint], TangentVector] = fisher_gradient_kl,
) -> FlowPath:
    """Explicit Euler descent along the Fisher gradient until D(p || q) <= tol.

    A step that leaves the simplex or fails to decrease D is retried with half
    the step size; the reduced size is kept for later steps.
    """
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    path = FlowPath([p0], [divergence(p0, q)], [])
    p, h = p0, step_size
    while path.divergences[-1] > tol:
        if path.steps >= max_steps:
            raise FlowDidNotConverge(f"D = {path.divergences[-1]:.3e} after {max_steps} steps", path)
        g = gradient(p, q).as_array()
        d_now = path.divergences[-1]
        while True:
            trial = p.as_array() - h * g
            if trial.min() > BOUNDARY:
                cand = SimplexPoint.normalized(trial)
                d_new = divergence(cand, q)
                if d_new < d_now:
                    break
            h *= 0.5
            if h < 1e-18:
                raise FlowDidNotConverge("step size underflow; no descent direction", path)
        p = cand
        path.points.append(p)
        path.divergences.append(d_new)
        path.step_sizes.append(h)
    return path
