"""Hilbert-style proof objects for GL and a line-by-line checker.

Rules: instances of K and of the GL (Löb) axiom, propositional tautologies
(boxed subformulas treated as atoms), modus ponens and necessitation.
Citations are 1-based line numbers and must point strictly backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formulas import (
    BOT,
    TOP,
    And,
    Bot,
    Box,
    Iff,
    Imp,
    ModalFormula,
    Not,
    Or,
    PVar,
    Top,
    random_modal,
    show,
)

RULES = ("K", "GL", "taut", "mp", "nec")
MAX_TAUT_ATOMS = 20


@dataclass(frozen=True)
class ProofLine:
    formula: ModalFormula
    rule: str
    cites: tuple[int, ...] = ()


@dataclass(frozen=True)
class ProofObject:
    lines: tuple[ProofLine, ...]

    @property
    def conclusion(self) -> ModalFormula:
        if not self.lines:
            raise ValueError("empty proof has no conclusion")
        return self.lines[-1].formula

    def render(self) -> str:
        out = []
        for i, ln in enumerate(self.lines, 1):
            cite = f" {', '.join(map(str, ln.cites))}" if ln.cites else ""
            out.append(f"{i:>3}. {show(ln.formula)}    [{ln.rule}{cite}]")
        return "\n".join(out)


@dataclass(frozen=True)
class ProofCheck:
    valid: bool
    line: int | None = None  # first failing line, 1-based
    reason: str = ""


# --------------------------------------------------------------------------- schema matching
def is_k_instance(f: ModalFormula) -> bool:
    """box(A -> B) -> (box A -> box B)"""
    if not (isinstance(f, Imp) and isinstance(f.left, Box) and isinstance(f.left.body, Imp)):
        return False
    a, b = f.left.body.left, f.left.body.right
    return f.right == Imp(Box(a), Box(b))


def is_gl_instance(f: ModalFormula) -> bool:
    """box(box A -> A) -> box A"""
    if not (isinstance(f, Imp) and isinstance(f.right, Box)):
        return False
    a = f.right.body
    return f.left == Box(Imp(Box(a), a))


def _atoms(f: ModalFormula, acc: dict):
    if isinstance(f, (PVar, Box)):
        acc.setdefault(f, len(acc))
    elif isinstance(f, Not):
        _atoms(f.body, acc)
    elif isinstance(f, (And, Or, Imp, Iff)):
        _atoms(f.left, acc)
        _atoms(f.right, acc)


def _truth(f: ModalFormula, cols: dict, rows: int) -> np.ndarray:
    if isinstance(f, Bot):
        return np.zeros(rows, dtype=bool)
    if isinstance(f, Top):
        return np.ones(rows, dtype=bool)
    if isinstance(f, (PVar, Box)):
        return cols[f]
    if isinstance(f, Not):
        return ~_truth(f.body, cols, rows)
    a, b = _truth(f.left, cols, rows), _truth(f.right, cols, rows)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Imp):
        return ~a | b
    return a == b


def is_tautology(f: ModalFormula) -> bool:
    """Classical tautology with variables and boxed subformulas as atoms."""
    atoms: dict = {}
    _atoms(f, atoms)
    if len(atoms) > MAX_TAUT_ATOMS:
        raise ValueError(f"tautology check limited to {MAX_TAUT_ATOMS} atoms")
    rows = 1 << len(atoms)
    codes = np.arange(rows, dtype=np.int64)
    cols = {a: ((codes >> i) & 1).astype(bool) for a, i in atoms.items()}
    return bool(_truth(f, cols, rows).all())


def check_proof(proof: ProofObject) -> ProofCheck:
    for n, ln in enumerate(proof.lines, 1):
        if ln.rule not in RULES:
            return ProofCheck(False, n, f"unknown rule {ln.rule!r}")
        if any(not (1 <= c < n) for c in ln.cites):
            return ProofCheck(False, n, f"citation {ln.cites} does not point to an earlier line")
        arity = {"mp": 2, "nec": 1}.get(ln.rule, 0)
        if len(ln.cites) != arity:
            return ProofCheck(False, n, f"{ln.rule} needs {arity} citation(s), got {len(ln.cites)}")
        f = ln.formula
        if ln.rule == "K" and not is_k_instance(f):
            return ProofCheck(False, n, "not an instance of box(A -> B) -> (box A -> box B)")
        if ln.rule == "GL" and not is_gl_instance(f):
            return ProofCheck(False, n, "not an instance of box(box A -> A) -> box A")
        if ln.rule == "taut" and not is_tautology(f):
            return ProofCheck(False, n, "not a propositional tautology")
        if ln.rule == "mp":
            a = proof.lines[ln.cites[0] - 1].formula
            imp = proof.lines[ln.cites[1] - 1].formula
            if not isinstance(imp, Imp):
                return ProofCheck(False, n, f"line {ln.cites[1]} is not an implication")
            if imp.left != a:
                return ProofCheck(False, n, f"antecedent of line {ln.cites[1]} does not match line {ln.cites[0]}")
            if imp.right != f:
                return ProofCheck(False, n, f"consequent of line {ln.cites[1]} is not this formula")
        if ln.rule == "nec":
            src = proof.lines[ln.cites[0] - 1].formula
            if f != Box(src):
                return ProofCheck(False, n, f"not the necessitation of line {ln.cites[0]}")
    if not proof.lines:
        return ProofCheck(False, None, "empty proof")
    return ProofCheck(True)


# --------------------------------------------------------------------------- construction
class ProofBuilder:
    def __init__(self):
        self.lines: list[ProofLine] = []

    def add(self, formula: ModalFormula, rule: str, *cites: int) -> int:
        self.lines.append(ProofLine(formula, rule, tuple(cites)))
        return len(self.lines)

    def formula(self, n: int) -> ModalFormula:
        return self.lines[n - 1].formula

    def mp(self, a: int, imp: int) -> int:
        return self.add(self.formula(imp).right, "mp", a, imp)

    def nec(self, n: int) -> int:
        return self.add(Box(self.formula(n)), "nec", n)

    def box_mono(self, imp: int) -> int:
        """From A -> B derive box A -> box B via nec, K and mp."""
        f = self.formula(imp)
        boxed = self.nec(imp)
        k = self.add(Imp(Box(f), Imp(Box(f.left), Box(f.right))), "K")
        return self.mp(boxed, k)

    def build(self) -> ProofObject:
        return ProofObject(tuple(self.lines))


def proof_of_top() -> ProofObject:
    b = ProofBuilder()
    p = PVar("p")
    one = b.add(Imp(p, p), "taut")
    two = b.add(Imp(Imp(p, p), TOP), "taut")
    b.mp(one, two)
    return b.build()


def proof_of_boxed_identity(a: ModalFormula = PVar("p")) -> ProofObject:
    b = ProofBuilder()
    b.nec(b.add(Imp(a, a), "taut"))
    return b.build()


def _random_tautology(rng, a, c) -> ModalFormula:
    templates = (
        lambda: Imp(a, a),
        lambda: Imp(a, Imp(c, a)),
        lambda: Imp(And(a, c), a),
        lambda: Or(a, Not(a)),
        lambda: Imp(a, Or(a, c)),
        lambda: Iff(Not(Not(a)), a),
        lambda: Imp(BOT, a),
    )
    return templates[rng.integers(len(templates))]()


def random_proof(rng: np.random.Generator, steps: int = 8, depth: int = 2) -> ProofObject:
    """A correct proof built by random forward application of the rules."""
    b = ProofBuilder()
    for _ in range(steps):
        r = rng.random()
        a, c = random_modal(rng, depth), random_modal(rng, depth)
        if r < 0.25 or not b.lines:
            b.add(_random_tautology(rng, a, c), "taut")
        elif r < 0.35:
            b.add(Imp(Box(Imp(Box(a), a)), Box(a)), "GL")
        elif r < 0.45:
            b.add(Imp(Box(Imp(a, c)), Imp(Box(a), Box(c))), "K")
        elif r < 0.6:
            b.nec(int(rng.integers(1, len(b.lines) + 1)))
        else:
            imps = [n for n, ln in enumerate(b.lines, 1) if isinstance(ln.formula, Imp)]
            pairs = [(m, n) for n in imps for m in range(1, len(b.lines) + 1)
                     if b.formula(m) == b.formula(n).left]
            if pairs:
                m, n = pairs[rng.integers(len(pairs))]
                b.mp(m, n)
            elif imps:
                b.box_mono(imps[rng.integers(len(imps))])
            else:
                b.add(_random_tautology(rng, a, c), "taut")
    return b.build()


def proof_corpus(n: int = 100, seed: int = 0, steps: int = 8) -> list[ProofObject]:
    rng = np.random.default_rng(seed)
    return [random_proof(rng, steps) for _ in range(n)]
