"""Löb's theorem, the provability fixed point, conjunction closure and the
consistency-extension hierarchy, each checked with the GL decider."""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import BOT, TOP, And, Box, Iff, Imp, ModalFormula, Not, PVar, conj, show
from .kripke import KripkeModel
from .tableau import DEFAULT_BUDGET, Decision, gl_decide, satisfy


def lob_instance(phi: ModalFormula) -> ModalFormula:
    return Imp(Box(Imp(Box(phi), phi)), Box(phi))


def lob_check(phi: ModalFormula, budget: int = DEFAULT_BUDGET) -> bool:
    return gl_decide(lob_instance(phi), budget).valid


def boxdot(f: ModalFormula) -> ModalFormula:
    """f & box f: truth here and at every later world."""
    return And(f, Box(f))


@dataclass(frozen=True)
class Certificate:
    name: str
    formula: ModalFormula
    decision: Decision

    @property
    def valid(self) -> bool:
        return self.decision.valid


@dataclass(frozen=True)
class FixedPoint:
    formula: ModalFormula
    certificates: tuple[Certificate, Certificate, Certificate]
    unboxed_probe: Certificate  # (p <-> box p) -> (p <-> true); invalid, kept for the record

    @property
    def certified(self) -> bool:
        return all(c.valid for c in self.certificates)


def fixed_point_lambda() -> FixedPoint:
    """Lambda = true. Certificates: it satisfies Lambda <-> box Lambda, it is
    provable, and any p with p <-> box p holding everywhere is equivalent to it."""
    lam = TOP
    p = PVar("p")
    fp = Iff(p, Box(p))
    defining = Iff(lam, Box(lam))
    unique = Imp(boxdot(fp), Iff(p, lam))
    certs = (
        Certificate("defining equivalence", defining, gl_decide(defining)),
        Certificate("provability", lam, gl_decide(lam)),
        Certificate("uniqueness", unique, gl_decide(unique)),
    )
    probe = Imp(fp, Iff(p, lam))
    return FixedPoint(lam, certs, Certificate("unboxed uniqueness", probe, gl_decide(probe)))


class InvalidConjunct(ValueError):
    def __init__(self, index: int, formula: ModalFormula, decision: Decision):
        super().__init__(f"conjunct {index} is not GL-valid: {show(formula)}")
        self.index = index
        self.formula = formula
        self.decision = decision


@dataclass(frozen=True)
class Closure:
    formula: ModalFormula
    decision: Decision


def conjunction_closure(theorems: list[ModalFormula]) -> Closure:
    for i, f in enumerate(theorems):
        d = gl_decide(f)
        if not d.valid:
            raise InvalidConjunct(i, f, d)
    v = conj(*theorems)
    d = gl_decide(v)
    if not d.valid:  # cannot happen for a sound decider
        raise AssertionError("conjunction of valid formulas judged invalid")
    return Closure(v, d)


# --------------------------------------------------------------------------- hierarchy
def con(k: int) -> PVar:
    return PVar(f"con_{k}")


@dataclass(frozen=True)
class TheoryLevel:
    index: int
    extra_axioms: tuple[ModalFormula, ...]

    def premise(self) -> ModalFormula:
        # axioms hold at every world, so each enters as A & box A
        return conj(*(boxdot(a) for a in self.extra_axioms))

    def derives(self, f: ModalFormula) -> Decision:
        return gl_decide(Imp(self.premise(), f))


@dataclass(frozen=True)
class LevelReport:
    level: TheoryLevel
    next_derives_con: bool
    derives_con: bool
    witness: KripkeModel | None  # model of level k where con_k fails
    consistent: bool
    one_world_model: KripkeModel | None
    includes_previous: bool

    @property
    def ok(self) -> bool:
        return (self.next_derives_con and not self.derives_con and self.witness is not None
                and self.consistent and self.includes_previous)


def theory_level(k: int) -> TheoryLevel:
    return TheoryLevel(k, tuple(con(i) for i in range(k)))


def extension_hierarchy(depth: int) -> list[LevelReport]:
    if not 0 <= depth <= 8:
        raise ValueError("depth must lie in 0..8")
    reports = []
    prev: TheoryLevel | None = None
    for k in range(depth):
        level, nxt = theory_level(k), theory_level(k + 1)
        up = nxt.derives(con(k))
        here = level.derives(con(k))
        one = KripkeModel.from_edges(1, [], {0: {a.name for a in level.extra_axioms}})
        consistent = one.holds(level.premise(), 0) and satisfy(level.premise())[0] is not None
        includes = prev is None or set(prev.extra_axioms) <= set(level.extra_axioms)
        reports.append(LevelReport(level, up.valid, here.valid, here.countermodel, consistent, one, includes))
        prev = level
    return reports


def consistency_unprovable() -> Decision:
    """!box false is not a theorem; the countermodel is a dead-end world."""
    return gl_decide(Not(Box(BOT)))
