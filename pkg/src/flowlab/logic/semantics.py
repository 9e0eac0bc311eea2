"""Tarskian evaluation of trajectory formulas over finite sampled structures.

Quantifiers range over the finite time and state domains of the structure
("sampled semantics"). X(t, s) holds when state s lies within ``match_tol``
of the trajectory value at time t. Empty domains follow the usual
convention: forall is vacuously true, exists is false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..core import StateVector, euclidean
from .syntax import (
    STATE,
    TIME,
    And,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Less,
    Not,
    Or,
    Pred,
    Var,
    XAtom,
    free_variables,
)

DEFAULT_BUDGET = 50_000_000


class EvaluationError(RuntimeError):
    pass


class UnboundVariable(EvaluationError):
    pass


class BudgetExceeded(EvaluationError):
    pass


def _as_state(v) -> StateVector:
    if isinstance(v, StateVector):
        return v
    if isinstance(v, (int, float)):
        return StateVector.of(float(v))
    return StateVector(tuple(v))


class Structure:
    """Finite two-sorted structure built from a sampled trajectory."""

    def __init__(
        self,
        time_domain: Sequence[float],
        state_domain: Sequence,
        trajectory: Callable[[float], object],
        predicates: Mapping[str, Callable[[StateVector], bool]] | None = None,
        match_tol: float = 0.0,
        metric: Callable[[StateVector, StateVector], float] = euclidean,
        label: str = "sampled semantics",
    ):
        times = [float(t) for t in time_domain]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("time domain must be sorted and free of duplicates")
        self.time_domain = tuple(times)
        self.state_domain = tuple(_as_state(s) for s in state_domain)
        self.trajectory = trajectory
        self.predicates = dict(predicates or {})
        self.match_tol = float(match_tol)
        self.metric = metric
        self.label = label
        self._traj = [_as_state(trajectory(t)) for t in self.time_domain]
        self._x_rows: dict[int, list[bool]] = {}
        self._pred_rows: dict[str, list[bool]] = {}
        self._scalar = all(s.dim == 1 for s in self.state_domain) and all(s.dim == 1 for s in self._traj)
        if self._scalar:
            self._state_arr = np.array([s.coords[0] for s in self.state_domain])
        self._state_index = {s: i for i, s in reversed(list(enumerate(self.state_domain)))}

    def trajectory_at(self, i: int) -> StateVector:
        return self._traj[i]

    def x_row(self, i: int) -> list[bool]:
        """Truth values of X(time_i, s) for every state s."""
        row = self._x_rows.get(i)
        if row is None:
            if self._scalar:
                d = np.abs(self._state_arr - self._traj[i].coords[0])
                row = (d <= self.match_tol).tolist()
            else:
                x = self._traj[i]
                row = [self.metric(s, x) <= self.match_tol for s in self.state_domain]
            self._x_rows[i] = row
        return row

    def pred_row(self, name: str) -> list[bool]:
        row = self._pred_rows.get(name)
        if row is None:
            if name not in self.predicates:
                raise EvaluationError(f"unknown predicate {name!r}")
            fn = self.predicates[name]
            row = [bool(fn(s)) for s in self.state_domain]
            self._pred_rows[name] = row
        return row

    def domain(self, sort: str) -> tuple:
        return self.time_domain if sort == TIME else self.state_domain

    def index_of(self, sort: str, value) -> int:
        if sort == TIME:
            try:
                return self.time_domain.index(float(value))
            except ValueError:
                raise EvaluationError(f"{value!r} is not in the time domain") from None
        s = _as_state(value)
        if s not in self._state_index:
            raise EvaluationError(f"{value!r} is not in the state domain")
        return self._state_index[s]


@dataclass
class Assignment:
    bindings: dict[str, object] = field(default_factory=dict)

    def bind(self, name: str, value) -> "Assignment":
        return Assignment({**self.bindings, name: value})


class _Compiler:
    """Turns a formula into nested closures over an index environment."""

    def __init__(self, structure: Structure, budget: int):
        self.m = structure
        self.budget = budget
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceeded(f"evaluation exceeded the node budget of {self.budget}")

    def compile(self, f: Formula):
        m, tick = self.m, self.tick
        if isinstance(f, Const):
            v = f.value
            return lambda env: (tick(), v)[1]
        if isinstance(f, XAtom):
            t, s = f.time.name, f.state.name
            row = m.x_row
            return lambda env: (tick(), row(env[t])[env[s]])[1]
        if isinstance(f, Pred):
            name, a = f.name, f.arg.name
            row = m.pred_row(name)
            return lambda env: (tick(), row[env[a]])[1]
        if isinstance(f, Less):
            a, b = f.left.name, f.right.name
            times = m.time_domain
            return lambda env: (tick(), times[env[a]] < times[env[b]])[1]
        if isinstance(f, Eq):
            a, b = f.left.name, f.right.name
            dom = m.domain(f.left.sort)
            return lambda env: (tick(), dom[env[a]] == dom[env[b]])[1]
        if isinstance(f, Not):
            g = self.compile(f.body)
            return lambda env: (tick(), not g(env))[1]
        if isinstance(f, And):
            g, h = self.compile(f.left), self.compile(f.right)
            return lambda env: (tick(), g(env) and h(env))[1]
        if isinstance(f, Or):
            g, h = self.compile(f.left), self.compile(f.right)
            return lambda env: (tick(), g(env) or h(env))[1]
        if isinstance(f, Implies):
            g, h = self.compile(f.left), self.compile(f.right)
            return lambda env: (tick(), (not g(env)) or h(env))[1]
        if isinstance(f, (Forall, Exists)):
            g = self.compile(f.body)
            name = f.var.name
            n = len(m.domain(f.var.sort))
            want = isinstance(f, Exists)

            def quant(env):
                tick()
                saved = env.get(name, _MISSING)
                try:
                    for i in range(n):  # fixed ascending order for short-circuiting
                        env[name] = i
                        if g(env) == want:
                            return want
                    return not want
                finally:
                    if saved is _MISSING:
                        env.pop(name, None)
                    else:
                        env[name] = saved

            return quant
        raise TypeError(f"not a formula: {f!r}")


_MISSING = object()


def _index_env(structure: Structure, formula: Formula, assignment) -> dict[str, int]:
    bindings = assignment.bindings if isinstance(assignment, Assignment) else dict(assignment or {})
    env = {}
    for v in free_variables(formula):
        if v.name not in bindings:
            raise UnboundVariable(f"free variable {v.name!r} ({v.sort}) has no binding")
        env[v.name] = structure.index_of(v.sort, bindings[v.name])
    return env


def evaluate(structure: Structure, formula: Formula, assignment=None, budget: int = DEFAULT_BUDGET) -> bool:
    env = _index_env(structure, formula, assignment)
    return bool(_Compiler(structure, budget).compile(formula)(env))


@dataclass(frozen=True)
class EvaluationResult:
    value: bool
    bindings: dict[str, object]  # witness (for true exists) or counterexample (for false forall)
    nodes_evaluated: int
    semantics: str = "sampled semantics"


def evaluate_with_witness(structure: Structure, formula: Formula, assignment=None, budget: int = DEFAULT_BUDGET) -> EvaluationResult:
    """Evaluate and report witnesses along the leading quantifier prefix."""
    env = _index_env(structure, formula, assignment)
    comp = _Compiler(structure, budget)
    value = bool(comp.compile(formula)(env))
    bindings: dict[str, object] = {}
    f, target = formula, value
    while isinstance(f, (Forall, Exists)):
        # exists/true and forall/false have a distinguished element; stop otherwise
        if isinstance(f, Exists) != target:
            break
        body = comp.compile(f.body)
        dom = structure.domain(f.var.sort)
        for i in range(len(dom)):
            env[f.var.name] = i
            if bool(body(env)) == target:
                el = dom[i]
                bindings[f.var.name] = el if f.var.sort == TIME else list(el.coords)
                break
        f = f.body
    return EvaluationResult(value, bindings, comp.count, structure.label)


def check_functionality(structure: Structure) -> bool:
    """True iff at most one state lies within match_tol of each trajectory value."""
    return all(sum(structure.x_row(i)) <= 1 for i in range(len(structure.time_domain)))


# --------------------------------------------------------------------------- stock structures
def grid(start: float, stop: float, step: float) -> list[float]:
    n = math.floor((stop - start) / step + 1e-9)
    return [start + i * step for i in range(n + 1)]


def sin_structure(match_tol: float = 5e-4, time_step: float = 0.01, state_step: float = 0.001) -> Structure:
    """x(t) = sin t on [0, 2 pi], states on [-1, 1], P(s) iff s > 0."""
    states = [round(v, 12) for v in grid(-1.0, 1.0, state_step)]
    return Structure(
        grid(0.0, 2 * math.pi, time_step),
        states,
        math.sin,
        {"P": lambda s: s.coords[0] > 0},
        match_tol,
    )


def toy_structure(n_times: int = 10, n_states: int = 10, seed: int = 0) -> Structure:
    """Small structure with a random trajectory through a 1-D state grid and
    two random state predicates P and Q."""
    rng = np.random.default_rng(seed)
    states = [float(i) for i in range(n_states)]
    path = rng.integers(0, n_states, size=n_times)
    p_set = set(rng.choice(n_states, size=n_states // 2, replace=False).tolist())
    q_set = set(rng.choice(n_states, size=n_states // 3, replace=False).tolist())
    times = [float(t) for t in range(n_times)]
    return Structure(
        times,
        states,
        lambda t: float(path[int(t)]),
        {"P": lambda s: int(s.coords[0]) in p_set, "Q": lambda s: int(s.coords[0]) in q_set},
        match_tol=0.25,
    )


def random_formula(rng: np.random.Generator, depth: int, bound: dict[str, str] | None = None,
                   predicates: Sequence[str] = ("P", "Q"), closed: bool = True) -> Formula:
    """Random well-sorted formula; with ``closed`` every variable is bound."""
    bound = dict(bound or {})
    times = [n for n, s in bound.items() if s == TIME]
    states = [n for n, s in bound.items() if s == STATE]

    def atom():
        options = ["const"]
        if times and states:
            options += ["X", "X"]
        if states:
            options += ["pred", "eqs"]
        if times:
            options += ["less", "eqt"]
        kind = options[rng.integers(len(options))]
        pick = lambda xs: xs[rng.integers(len(xs))]
        if kind == "X":
            return XAtom(Var(pick(times), TIME), Var(pick(states), STATE))
        if kind == "pred":
            return Pred(pick(list(predicates)), Var(pick(states), STATE))
        if kind == "eqs":
            return Eq(Var(pick(states), STATE), Var(pick(states), STATE))
        if kind == "less":
            return Less(Var(pick(times), TIME), Var(pick(times), TIME))
        if kind == "eqt":
            return Eq(Var(pick(times), TIME), Var(pick(times), TIME))
        return Const(bool(rng.integers(2)))

    if depth <= 0:
        return atom()
    r = rng.random()
    if r < 0.35 or (closed and not bound and r < 0.9):
        sort = TIME if rng.random() < 0.5 else STATE
        name = ("t" if sort == TIME else "s") + str(len(bound))
        body = random_formula(rng, depth - 1, {**bound, name: sort}, predicates, closed)
        return (Forall if rng.random() < 0.5 else Exists)(Var(name, sort), body)
    if r < 0.5:
        return Not(random_formula(rng, depth - 1, bound, predicates, closed))
    if r < 0.9:
        cls = (And, Or, Implies)[rng.integers(3)]
        return cls(
            random_formula(rng, depth - 1, bound, predicates, closed),
            random_formula(rng, depth - 1, bound, predicates, closed),
        )
    return atom()
