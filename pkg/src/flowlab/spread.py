"""Finite spreads of choice sequences over a grid of states in [0, 1].

A node is a finite sequence (s_0, ..., s_{n-1}) of grid values with
|s_{k+1} - s_k| <= delta(k). Its depth is its length; the root is the empty
sequence and its children are all single-term sequences. Tips live at
``max_depth`` and a tip's last entry stands in for the limit state.

Admissibility only constrains consecutive terms, so the set of tips below a
node depends on the node's depth and last entry alone. Oscillations and the
bar search use that to work per (depth, last value) instead of per node.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

_EPS = 1e-12


@dataclass(frozen=True)
class SpreadSpec:
    state_grid: tuple[float, ...]
    delta: Callable[[int], float]
    max_depth: int

    def __post_init__(self):
        grid = tuple(sorted(float(v) for v in self.state_grid))
        if len(grid) < 2:
            raise ValueError("state grid needs at least two points")
        if len(set(grid)) != len(grid):
            raise ValueError("state grid has repeated points")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        for k in range(self.max_depth):
            if not self.delta(k) > 0:
                raise ValueError(f"delta({k}) must be positive")
        object.__setattr__(self, "state_grid", grid)

    @classmethod
    def dyadic(cls, grid_exponent: int, max_depth: int, delta: Callable[[int], float] | None = None) -> "SpreadSpec":
        """Grid {j / 2^e} on [0, 1]; delta defaults to 2^-(k+2)."""
        m = 2**grid_exponent
        return cls(tuple(j / m for j in range(m + 1)), delta or geometric_delta, max_depth)

    @property
    def size(self) -> int:
        return len(self.state_grid)

    def window(self, value: float, k: int) -> tuple[int, int]:
        """Index range [lo, hi] of grid points within delta(k) of ``value``."""
        d = self.delta(k) + _EPS
        g = self.state_grid
        return bisect.bisect_left(g, value - d), bisect.bisect_right(g, value + d) - 1

    def is_admissible(self, node: "SpreadNode") -> bool:
        s = node.seq
        grid = set(self.state_grid)
        if len(s) > self.max_depth or any(v not in grid for v in s):
            return False
        return all(abs(b - a) <= self.delta(k) + _EPS for k, (a, b) in enumerate(zip(s, s[1:])))


def geometric_delta(k: int) -> float:
    return 2.0 ** -(k + 2)


@dataclass(frozen=True)
class SpreadNode:
    seq: tuple[float, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.seq)

    @property
    def last(self) -> float:
        return self.seq[-1]


@dataclass(frozen=True)
class ModulusResult:
    epsilon: float
    bar_depth: int
    omega: float
    level_oscillation: list[float] = field(default_factory=list)
    node_counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")


class ShallowTree(RuntimeError):
    """No depth up to max_depth bars the tree at the requested epsilon."""


class DepthExhausted(ValueError):
    pass


def admissible_children(spec: SpreadSpec, node: SpreadNode) -> list[SpreadNode]:
    if node.depth >= spec.max_depth:
        raise DepthExhausted(f"node already has max_depth {spec.max_depth} terms")
    if node.depth == 0:
        return [SpreadNode((v,)) for v in spec.state_grid]
    lo, hi = spec.window(node.last, node.depth - 1)
    return [SpreadNode(node.seq + (v,)) for v in spec.state_grid[lo : hi + 1]]


def iter_nodes(spec: SpreadSpec, depth: int, prefix: SpreadNode = SpreadNode()) -> Iterator[SpreadNode]:
    """Every admissible node of the given depth extending ``prefix`` (explicit enumeration)."""
    if prefix.depth == depth:
        yield prefix
        return
    for child in admissible_children(spec, prefix):
        yield from iter_nodes(spec, depth, child)


@dataclass(frozen=True)
class SequenceDistance:
    value: float
    tail_bound: float

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def sequence_metric(a, b) -> SequenceDistance:
    """sum_k 2^-(k+1) min(1, |a_k - b_k|) over the common prefix, plus the bound
    2^-m on the unseen tail (m = common length)."""
    sa = a.seq if isinstance(a, SpreadNode) else tuple(a)
    sb = b.seq if isinstance(b, SpreadNode) else tuple(b)
    m = min(len(sa), len(sb))
    value = math.fsum(2.0 ** -(k + 1) * min(1.0, abs(sa[k] - sb[k])) for k in range(m))
    return SequenceDistance(value, 2.0**-m)


def tail_bound(spec: SpreadSpec, depth: int, terms: int = 200) -> float:
    """Sum of delta(k) for k >= depth - 1: how far a limit state can drift from
    the last entry of a depth-``depth`` node (truncated after ``terms`` terms)."""
    start = max(depth - 1, 0)
    return math.fsum(spec.delta(k) for k in range(start, start + terms))


def _reach_interval(spec: SpreadSpec, lo: int, hi: int, depth: int, horizon: int) -> tuple[int, int]:
    """Indices reachable after ``horizon`` more terms from last entries grid[lo..hi] at ``depth``.

    The image of a contiguous block of grid points is again contiguous, so the
    reachable set is an index interval.
    """
    g = spec.state_grid
    for step in range(horizon):
        k = depth - 1 + step  # constraint index between positions depth-1+step and depth+step
        lo = spec.window(g[lo], k)[0]
        hi = spec.window(g[hi], k)[1]
    return lo, hi


def _values_on_grid(spec: SpreadSpec, F: Callable[[float], float]) -> np.ndarray:
    return np.array([float(F(v)) for v in spec.state_grid])


def oscillation(spec: SpreadSpec, F: Callable[[float], float], node: SpreadNode, horizon: int) -> float:
    """max |F(a) - F(b)| over tips a, b of admissible extensions of ``node`` by ``horizon`` terms."""
    if horizon < 0 or node.depth + horizon > spec.max_depth:
        raise ValueError("horizon must lie in [0, max_depth - depth]")
    if horizon == 0:
        return 0.0
    Fv = _values_on_grid(spec, F)
    if node.depth == 0:
        lo, hi = 0, spec.size - 1
        lo, hi = _reach_interval(spec, lo, hi, 1, horizon - 1)
    else:
        i = spec.state_grid.index(node.last)
        lo, hi = _reach_interval(spec, i, i, node.depth, horizon)
    seg = Fv[lo : hi + 1]
    return float(seg.max() - seg.min())


def reachable_last_values(spec: SpreadSpec, depth: int) -> np.ndarray:
    """Boolean mask of grid values that occur as the last entry of some depth-``depth`` node."""
    mask = np.ones(spec.size, dtype=bool)
    for k in range(depth - 1):
        mask = _propagate_mask(spec, mask, k)
    return mask


def _propagate_mask(spec: SpreadSpec, mask: np.ndarray, k: int) -> np.ndarray:
    """One step of set propagation by explicit union of windows (no interval shortcut)."""
    cover = np.zeros(spec.size + 1, dtype=np.int64)
    for i in np.flatnonzero(mask):
        lo, hi = spec.window(spec.state_grid[i], k)
        cover[lo] += 1
        cover[hi + 1] -= 1
    return np.cumsum(cover[:-1]) > 0


def level_oscillation(spec: SpreadSpec, Fv: np.ndarray, depth: int) -> float:
    """Largest oscillation over all nodes of the given depth, tips at max_depth."""
    horizon = spec.max_depth - depth
    if horizon == 0:
        return 0.0
    if depth == 0:
        lo, hi = _reach_interval(spec, 0, spec.size - 1, 1, horizon - 1)
        return float(Fv[lo : hi + 1].max() - Fv[lo : hi + 1].min())
    worst = 0.0
    for i in np.flatnonzero(reachable_last_values(spec, depth)):
        lo, hi = _reach_interval(spec, i, i, depth, horizon)
        seg = Fv[lo : hi + 1]
        worst = max(worst, float(seg.max() - seg.min()))
    return worst


def node_counts(spec: SpreadSpec, max_level: int | None = None) -> list[int]:
    """Number of admissible nodes at each depth 0..max_level (exact integers)."""
    max_level = spec.max_depth if max_level is None else max_level
    counts = [1]
    if max_level == 0:
        return counts
    per_value = [1] * spec.size
    counts.append(spec.size)
    for depth in range(2, max_level + 1):
        nxt = [0] * spec.size
        for i, c in enumerate(per_value):
            if c:
                lo, hi = spec.window(spec.state_grid[i], depth - 2)
                for j in range(lo, hi + 1):
                    nxt[j] += c
        per_value = nxt
        counts.append(sum(per_value))
    return counts


def modulus_of_continuity(spec: SpreadSpec, F: Callable[[float], float], epsilon: float) -> ModulusResult:
    """Least depth N at which every node has oscillation < epsilon; omega = 2^-N.

    Only depths below max_depth count: at max_depth there are no extensions
    left, so the zero oscillation there says nothing about F.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    Fv = _values_on_grid(spec, F)
    levels: list[float] = []
    for depth in range(spec.max_depth):
        levels.append(level_oscillation(spec, Fv, depth))
        if levels[-1] < epsilon:
            return ModulusResult(epsilon, depth, 2.0**-depth, levels, node_counts(spec, depth))
    raise ShallowTree(f"no bar of depth < {spec.max_depth} for epsilon={epsilon:g}")


def verify_bar(spec: SpreadSpec, F: Callable[[float], float], depth: int, epsilon: float) -> tuple[bool, float]:
    """Check by explicit set propagation that all tips sharing a depth-``depth``
    prefix have F-values within epsilon. Returns (ok, largest tip gap)."""
    Fv = _values_on_grid(spec, F)
    if depth == 0:
        starts = [np.ones(spec.size, dtype=bool)]
        first_k = 0
    else:
        starts = []
        for i in np.flatnonzero(reachable_last_values(spec, depth)):
            m = np.zeros(spec.size, dtype=bool)
            m[i] = True
            starts.append(m)
        first_k = depth - 1
    worst = 0.0
    for mask in starts:
        for k in range(first_k, spec.max_depth - 1):
            mask = _propagate_mask(spec, mask, k)
        vals = Fv[mask]
        worst = max(worst, float(vals.max() - vals.min()))
    return worst < epsilon, worst


@dataclass(frozen=True)
class TreeProperties:
    finitely_branching: bool
    max_branching: int
    nonatomic: bool
    extendable: bool


def check_tree_properties(spec: SpreadSpec, depth: int) -> TreeProperties:
    """Branching statistics of all nodes of depth < ``depth``."""
    if depth > spec.max_depth:
        raise ValueError("depth exceeds max_depth")
    max_b, min_b = spec.size, spec.size  # the root branches to every grid point
    for d in range(1, depth):
        for i in np.flatnonzero(reachable_last_values(spec, d)):
            lo, hi = spec.window(spec.state_grid[i], d - 1)
            b = hi - lo + 1
            max_b, min_b = max(max_b, b), min(min_b, b)
    return TreeProperties(
        finitely_branching=max_b <= spec.size,
        max_branching=max_b,
        nonatomic=min_b >= 2,
        extendable=min_b >= 1,
    )
