"""Finite Kripke models for GL (transitive, irreflexive frames) and a
brute-force validity oracle over all small frames."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .formulas import BINARY, And, Bot, Box, Iff, Imp, ModalFormula, Not, Or, PVar, Top, variables


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[int, ...]
    relation: frozenset[tuple[int, int]]
    valuation: dict[int, frozenset[str]] = field(hash=False)

    def __post_init__(self):
        ws = set(self.worlds)
        for a, b in self.relation:
            if a not in ws or b not in ws:
                raise FrameError(f"edge ({a}, {b}) leaves the world set")
            if a == b:
                raise FrameError(f"world {a} sees itself; GL frames are irreflexive")
        for a, b in self.relation:
            for c, d in self.relation:
                if b == c and (a, d) not in self.relation:
                    raise FrameError(f"relation is not transitive: missing ({a}, {d})")

    @classmethod
    def from_edges(cls, n: int, edges, valuation: dict[int, set[str]] | None = None, close: bool = True) -> "KripkeModel":
        rel = set(edges)
        if close:
            rel = transitive_closure(rel)
        val = {w: frozenset((valuation or {}).get(w, ())) for w in range(n)}
        return cls(tuple(range(n)), frozenset(rel), val)

    def successors(self, w: int) -> list[int]:
        return sorted(b for a, b in self.relation if a == w)

    def truth_set(self, f: ModalFormula) -> frozenset[int]:
        return frozenset(w for w in self.worlds if self.holds(f, w))

    def holds(self, f: ModalFormula, w: int) -> bool:
        return _holds(self, f, w, {})

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "edges": sorted([list(e) for e in self.relation]),
            "valuation": {str(w): sorted(self.valuation.get(w, ())) for w in self.worlds},
        }


def _holds(m: KripkeModel, f: ModalFormula, w: int, memo: dict) -> bool:
    key = (id(f), w)
    if key in memo:
        return memo[key][1]
    if isinstance(f, Bot):
        v = False
    elif isinstance(f, Top):
        v = True
    elif isinstance(f, PVar):
        v = f.name in m.valuation.get(w, ())
    elif isinstance(f, Not):
        v = not _holds(m, f.body, w, memo)
    elif isinstance(f, Box):
        v = all(_holds(m, f.body, u, memo) for u in m.successors(w))
    elif isinstance(f, And):
        v = _holds(m, f.left, w, memo) and _holds(m, f.right, w, memo)
    elif isinstance(f, Or):
        v = _holds(m, f.left, w, memo) or _holds(m, f.right, w, memo)
    elif isinstance(f, Imp):
        v = (not _holds(m, f.left, w, memo)) or _holds(m, f.right, w, memo)
    elif isinstance(f, Iff):
        v = _holds(m, f.left, w, memo) == _holds(m, f.right, w, memo)
    else:
        raise TypeError(f"not a modal formula: {f!r}")
    memo[key] = (f, v)  # keep f alive so its id stays unique
    return v


def transitive_closure(edges) -> set[tuple[int, int]]:
    rel = set(edges)
    while True:
        extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        if not extra:
            return rel
        rel |= extra


# --------------------------------------------------------------------------- brute force
@lru_cache(maxsize=None)
def strict_partial_orders(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All transitive irreflexive relations on n worlds, one per isomorphism class,
    as successor lists."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    seen, out = set(), []
    perms = list(itertools.permutations(range(n)))
    for mask in range(1 << len(pairs)):
        rel = {pairs[i] for i in range(len(pairs)) if mask >> i & 1}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
            continue
        canon = min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        out.append(tuple(tuple(sorted(b for a, b in rel if a == w)) for w in range(n)))
    return tuple(out)


def _eval_all(f: ModalFormula, succ, vals: dict[str, np.ndarray], memo: dict) -> np.ndarray:
    """Truth array of shape (valuations, worlds)."""
    key = id(f)
    if key in memo:
        return memo[key][1]
    shape = next(iter(vals.values())).shape if vals else (1, len(succ))
    if isinstance(f, Bot):
        r = np.zeros(shape, dtype=bool)
    elif isinstance(f, Top):
        r = np.ones(shape, dtype=bool)
    elif isinstance(f, PVar):
        r = vals[f.name]
    elif isinstance(f, Not):
        r = ~_eval_all(f.body, succ, vals, memo)
    elif isinstance(f, Box):
        a = _eval_all(f.body, succ, vals, memo)
        r = np.ones(shape, dtype=bool)
        for w, ss in enumerate(succ):
            if ss:
                r[:, w] = a[:, list(ss)].all(axis=1)
    else:
        a = _eval_all(f.left, succ, vals, memo)
        b = _eval_all(f.right, succ, vals, memo)
        if isinstance(f, And):
            r = a & b
        elif isinstance(f, Or):
            r = a | b
        elif isinstance(f, Imp):
            r = ~a | b
        elif isinstance(f, Iff):
            r = a == b
        else:
            raise TypeError(f"not a modal formula: {f!r}")
    memo[key] = (f, r)
    return r


def brute_force_countermodel(f: ModalFormula, max_worlds: int = 4) -> KripkeModel | None:
    """Search every frame with at most ``max_worlds`` worlds and every valuation;
    return a model whose world 0 falsifies f, or None if none exists."""
    names = sorted(variables(f))
    for n in range(1, max_worlds + 1):
        bits = n * len(names)
        codes = np.arange(1 << bits, dtype=np.int64)
        vals = {
            name: ((codes[:, None] >> (j * n + np.arange(n))[None, :]) & 1).astype(bool)
            for j, name in enumerate(names)
        }
        for succ in strict_partial_orders(n):
            truth = _eval_all(f, succ, vals, {})
            bad = np.argwhere(~truth)
            if bad.size:
                v_idx, w = (int(x) for x in bad[0])
                return _relabel(n, succ, names, vals, v_idx, w)
    return None


def _relabel(n, succ, names, vals, v_idx, w) -> KripkeModel:
    order = [w] + [u for u in range(n) if u != w]  # designated world becomes 0
    new = {u: i for i, u in enumerate(order)}
    edges = {(new[a], new[b]) for a in range(n) for b in succ[a]}
    valuation = {new[u]: {nm for nm in names if vals[nm][v_idx, u]} for u in range(n)}
    return KripkeModel.from_edges(n, edges, valuation, close=False)


def brute_force_valid(f: ModalFormula, max_worlds: int = 4) -> bool:
    return brute_force_countermodel(f, max_worlds) is None
