"""Decision procedure for GL by signed tableaux.

A set of signed formulas is saturated with the classical rules; then every
``F box A`` in it spawns a successor

    { T B, T box B : T box B in the set }  +  { F A, T box A }

The extra ``T box A`` (the Löb step) makes the set of true boxes grow
strictly along every edge, so the search terminates and the surviving
branches assemble into a finite transitive irreflexive countermodel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import And, Bot, Box, Iff, Imp, ModalFormula, Not, Or, PVar, Top, show, variables
from .kripke import KripkeModel

MAX_VARIABLES = 16
DEFAULT_BUDGET = 200_000

Signed = tuple[bool, ModalFormula]


class DecisionBudgetExceeded(RuntimeError):
    pass


class CountermodelMismatch(AssertionError):
    """The constructed model does not falsify the formula (internal error)."""


@dataclass(frozen=True)
class Decision:
    valid: bool
    formula: ModalFormula
    countermodel: KripkeModel | None = None
    world: int = 0
    expansions: int = 0

    def to_json(self) -> dict:
        out = {"formula": show(self.formula), "valid": self.valid, "expansions": self.expansions}
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel.to_json()
            out["designated_world"] = self.world
        return out


@dataclass
class _World:
    true_vars: frozenset[str]
    children: list["_World"] = field(default_factory=list)


def _expand(sf: Signed) -> list[list[Signed]] | None:
    """Branches produced by one classical rule; None for literals. An empty
    list means the formula closes the branch."""
    sign, f = sf
    if isinstance(f, Top):
        return [[]] if sign else []
    if isinstance(f, Bot):
        return [] if sign else [[]]
    if isinstance(f, Not):
        return [[(not sign, f.body)]]
    if isinstance(f, And):
        return [[(True, f.left), (True, f.right)]] if sign else [[(False, f.left)], [(False, f.right)]]
    if isinstance(f, Or):
        return [[(True, f.left)], [(True, f.right)]] if sign else [[(False, f.left), (False, f.right)]]
    if isinstance(f, Imp):
        return [[(False, f.left)], [(True, f.right)]] if sign else [[(True, f.left), (False, f.right)]]
    if isinstance(f, Iff):
        if sign:
            return [[(True, f.left), (True, f.right)], [(False, f.left), (False, f.right)]]
        return [[(True, f.left), (False, f.right)], [(False, f.left), (True, f.right)]]
    return None


class _Prover:
    def __init__(self, budget: int):
        self.budget = budget
        self.expansions = 0
        self.memo: dict[frozenset, _World | None] = {}

    def tick(self):
        self.expansions += 1
        if self.expansions > self.budget:
            raise DecisionBudgetExceeded(f"tableau search exceeded {self.budget} expansions")

    def sat(self, todo: frozenset[Signed]) -> _World | None:
        if todo in self.memo:
            return self.memo[todo]
        self.memo[todo] = None  # provisional; edges grow the box set so no cycle can hit this
        result = self._saturate(set(), list(todo))
        self.memo[todo] = result
        return result

    def _saturate(self, done: set[Signed], todo: list[Signed]) -> _World | None:
        self.tick()
        done = set(done)
        todo = list(todo)
        while todo:
            sf = todo.pop()
            if sf in done:
                continue
            if (not sf[0], sf[1]) in done:
                return None
            branches = _expand(sf)
            if branches is None:
                done.add(sf)
                continue
            if len(branches) == 0:
                return None
            if len(branches) == 1:
                todo.extend(branches[0])
                continue
            for br in branches:
                w = self._saturate(done, todo + br)
                if w is not None:
                    return w
            return None
        return self._jump(frozenset(done))

    def _jump(self, lits: frozenset[Signed]) -> _World | None:
        boxes = [f for s, f in lits if s and isinstance(f, Box)]
        carried = frozenset([(True, b.body) for b in boxes] + [(True, b) for b in boxes])
        world = _World(frozenset(f.name for s, f in lits if s and isinstance(f, PVar)))
        for s, f in sorted(lits, key=lambda sf: show(sf[1])):
            if not s and isinstance(f, Box):
                child = self.sat(carried | {(False, f.body), (True, f)})
                if child is None:
                    return None
                world.children.append(child)
        return world


def _to_model(root: _World) -> KripkeModel:
    ids: dict[int, int] = {}
    nodes: list[_World] = []
    stack = [root]
    while stack:
        w = stack.pop()
        if id(w) in ids:
            continue
        ids[id(w)] = len(nodes)
        nodes.append(w)
        stack.extend(reversed(w.children))
    edges = {(ids[id(w)], ids[id(c)]) for w in nodes for c in w.children}
    valuation = {i: set(w.true_vars) for i, w in enumerate(nodes)}
    return KripkeModel.from_edges(len(nodes), edges, valuation)


def satisfy(formula: ModalFormula, budget: int = DEFAULT_BUDGET) -> tuple[KripkeModel | None, int]:
    """A GL model whose world 0 satisfies ``formula``, or None if unsatisfiable."""
    if len(variables(formula)) > MAX_VARIABLES:
        raise DecisionBudgetExceeded(f"formula has more than {MAX_VARIABLES} variables")
    prover = _Prover(budget)
    root = prover.sat(frozenset([(True, formula)]))
    return (None if root is None else _to_model(root)), prover.expansions


def gl_decide(formula: ModalFormula, budget: int = DEFAULT_BUDGET) -> Decision:
    """Decide GL-validity. Invalid verdicts carry a countermodel that has been
    model-checked: the formula is false at the designated world."""
    model, spent = satisfy(Not(formula), budget)
    if model is None:
        return Decision(True, formula, expansions=spent)
    if model.holds(formula, 0):
        raise CountermodelMismatch(f"constructed model does not refute {show(formula)}")
    return Decision(False, formula, model, 0, spent)
