"""The three model systems: irrational circle rotation, the logistic map
T(x) = 4x(1-x), and the cat map (x, y) -> (x + y, 2x + y) mod 1.

Angles and distances on the circle are measured in turns, so the full circle
has length 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import wrap_gap

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CAT_MATRIX = np.array([[1, 1], [2, 1]])


# --------------------------------------------------------------------------- rotation
@dataclass(frozen=True)
class CircleState:
    angle: float

    def __post_init__(self):
        if not 0.0 <= self.angle < 1.0:
            raise ValueError(f"angle must lie in [0, 1), got {self.angle}")


@dataclass(frozen=True)
class RotationSystem:
    """Rotation by ``theta`` turns per unit time (irrationality cannot be checked)."""

    theta: float = GOLDEN

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 1 or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not a reduced fraction with q >= 1")

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def frac_product(t, theta: float):
    """Fractional part of ``t * theta`` using an error-free product (Dekker).

    Plain ``(t * theta) % 1`` loses about log2(t) bits; splitting the product
    into a rounded head and an exact tail keeps the result within a few ulp.
    """
    t = np.asarray(t, dtype=float)
    p = t * theta
    th, tl = _split(t)
    ah, al = _split(theta)
    err = ((th * ah - p) + th * al + tl * ah) + tl * al
    out = np.mod((p - np.floor(p)) + err, 1.0)
    return out if out.ndim else float(out)


def _mod1(a):
    r = np.mod(a, 1.0)
    # np.mod can round tiny negatives up to exactly 1.0
    return np.where(r >= 1.0, 0.0, r) if isinstance(r, np.ndarray) else (0.0 if r >= 1.0 else float(r))


def rotate(sys: RotationSystem, s: CircleState, t: float) -> CircleState:
    return CircleState(_mod1(s.angle + frac_product(t, sys.theta)))


def rotation_orbit(sys: RotationSystem, start: CircleState, n: int) -> np.ndarray:
    """Angles of the orbit at integer times 0..n."""
    k = np.arange(n + 1, dtype=float)
    return _mod1(start.angle + frac_product(k, sys.theta))


def circle_distance(a: float, b: float) -> float:
    return wrap_gap(a, b)


def _circle_gaps(angles: np.ndarray, target: float) -> np.ndarray:
    d = np.mod(np.abs(angles - target), 1.0)
    return np.minimum(d, 1.0 - d)


def convergents(theta: float, count: int) -> list[Convergent]:
    """Continued-fraction convergents p/q of ``theta`` after the integer part.

    The expansion is that of the exact binary value of ``theta``; a rational
    with a short expansion yields fewer than ``count`` entries.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    x = Fraction(theta)
    a0 = math.floor(x)
    p_prev, q_prev, p, q = 1, 0, a0, 1
    rem = x - a0
    out: list[Convergent] = []
    while rem != 0 and len(out) < count:
        x = 1 / rem
        a = math.floor(x)
        rem = x - a
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        out.append(Convergent(p, q))
    if not out:
        out.append(Convergent(a0, 1))
    return out


def return_times(sys: RotationSystem, start: CircleState, epsilon: float, n_max: int) -> list[int]:
    """Integer times 1..n_max at which the orbit is within ``epsilon`` turns of the start."""
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    orbit = rotation_orbit(sys, start, n_max)
    gaps = _circle_gaps(orbit[1:], start.angle)
    return [int(n) + 1 for n in np.flatnonzero(gaps < epsilon)]


# --------------------------------------------------------------------------- logistic
@dataclass(frozen=True)
class LogisticSystem:
    """The map T(x) = 4x(1 - x) on [0, 1]."""

    def step(self, x: float) -> float:
        return logistic_step(x)


def _check_unit(x: float):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"logistic map is defined on [0, 1], got {x}")


def logistic_step(x: float) -> float:
    _check_unit(x)
    return 4.0 * x * (1.0 - x)


def logistic_derivative(x: float) -> float:
    return 4.0 - 8.0 * x


def logistic_orbit(x0: float, n: int) -> list[float]:
    _check_unit(x0)
    out = [float(x0)]
    x = float(x0)
    for _ in range(n):
        x = 4.0 * x * (1.0 - x)
        out.append(x)
    return out


def logistic_orbit_array(x0: np.ndarray, n: int) -> np.ndarray:
    """Iterate an ensemble of starts; returns shape (n + 1, len(x0))."""
    x = np.array(x0, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = x
    for k in range(n):
        x = 4.0 * x * (1.0 - x)
        out[k + 1] = x
    return out


def logistic_preimages(x: float) -> tuple[float, float]:
    """The two solutions y of T(y) = x, smaller one first."""
    _check_unit(x)
    r = math.sqrt(1.0 - x)
    return (1.0 - r) / 2.0, (1.0 + r) / 2.0


# --------------------------------------------------------------------------- cat map
@dataclass(frozen=True)
class TorusState:
    """A point of the torus; coordinates may be floats or Fractions."""

    x: float
    y: float

    def __post_init__(self):
        if not (0 <= self.x < 1 and 0 <= self.y < 1):
            raise ValueError(f"torus coordinates must lie in [0, 1), got ({self.x}, {self.y})")


def cat_step(s: TorusState) -> TorusState:
    return TorusState((s.x + s.y) % 1, (2 * s.x + s.y) % 1)


def cat_orbit(s: TorusState, n: int) -> list[TorusState]:
    out = [s]
    for _ in range(n):
        s = cat_step(s)
        out.append(s)
    return out


def cat_step_array(xy: np.ndarray) -> np.ndarray:
    """Vectorised cat map on an array whose last axis is (x, y)."""
    x, y = xy[..., 0], xy[..., 1]
    return np.stack([_mod1(x + y), _mod1(2.0 * x + y)], axis=-1)


def cat_eigen() -> tuple[float, float]:
    """Eigenvalues (lambda_plus, lambda_minus) of the cat matrix."""
    ev = np.sort(np.linalg.eigvals(CAT_MATRIX.astype(float)).real)
    return float(ev[1]), float(ev[0])


def cat_unstable_direction() -> np.ndarray:
    w, v = np.linalg.eig(CAT_MATRIX.astype(float))
    u = v[:, int(np.argmax(np.abs(w)))].real
    return u / np.linalg.norm(u)


def torus_distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(wrap_gap(a[0], b[0]), wrap_gap(a[1], b[1]))


# --------------------------------------------------------------------------- chaos probes
@dataclass(frozen=True)
class SensitivityTrace:
    system: str
    separations: list[float]
    first_escape: int | None  # first n with separation > 0.5

    @property
    def escaped(self) -> bool:
        return self.first_escape is not None


def sensitivity_probe(system: str, x0, delta: float, n: int, theta: float = GOLDEN) -> SensitivityTrace:
    """Separation of two orbits started ``delta`` apart, for n steps.

    For the cat map the perturbation is taken along the unstable eigenvector.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if system == "logistic":
        a = float(x0)
        b = a + delta if a + delta <= 1.0 else a - delta
        seps = [abs(a - b)]
        for _ in range(n):
            a, b = 4.0 * a * (1.0 - a), 4.0 * b * (1.0 - b)
            seps.append(abs(a - b))
    elif system == "cat":
        a = np.array([x0[0], x0[1]], dtype=float)
        b = _mod1(a + delta * cat_unstable_direction())
        seps = [torus_distance(a, b)]
        for _ in range(n):
            a, b = cat_step_array(a), cat_step_array(b)
            seps.append(torus_distance(a, b))
    elif system == "rotation":
        a0 = float(x0)
        b0 = _mod1(a0 + delta)
        steps = frac_product(np.arange(n + 1, dtype=float), theta)
        oa, ob = _mod1(a0 + steps), _mod1(b0 + steps)
        d = np.mod(np.abs(oa - ob), 1.0)
        seps = list(np.minimum(d, 1.0 - d))
    else:
        raise ValueError(f"unknown system {system!r}")
    escape = next((k for k, s in enumerate(seps) if s > 0.5), None)
    return SensitivityTrace(system, [float(s) for s in seps], escape)


def lyapunov_exponent(system: str, x0=0.3, n: int = 10**6) -> float:
    """Largest Lyapunov exponent.

    logistic: orbit average of ln|T'(x_k)|, k < n (terms with x_k = 1/2 are
    skipped with a warning). cat: ln(lambda_plus), exact for a linear map.
    """
    if system == "cat":
        return math.log(cat_eigen()[0])
    if system != "logistic":
        raise ValueError(f"unknown system {system!r}")
    if n < 10**4:
        raise ValueError("n must be at least 10**4")
    x = float(x0)
    _check_unit(x)
    logs = []
    skipped = 0
    log = math.log
    for _ in range(n):
        d = 4.0 - 8.0 * x
        if d == 0.0:
            skipped += 1
        else:
            logs.append(log(abs(d)))
        x = 4.0 * x * (1.0 - x)
    if skipped:
        warnings.warn(f"{skipped} orbit points hit the critical point and were skipped")
    return math.fsum(logs) / len(logs)
