"""Modal formulas for provability logic, with parser and printer.

Syntax: ``false``, ``true``, identifiers, ``!A``, ``box A``, ``A & B``,
``A | B``, ``A -> B`` (right associative) and ``A <-> B``; unary operators
bind tightest, then ``&``, ``|``, ``->``, ``<->``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class Not:
    body: "ModalFormula"


@dataclass(frozen=True)
class Box:
    body: "ModalFormula"


@dataclass(frozen=True)
class And:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Or:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Imp:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Iff:
    left: "ModalFormula"
    right: "ModalFormula"


ModalFormula = Union[Bot, Top, PVar, Not, Box, And, Or, Imp, Iff]
BINARY = (And, Or, Imp, Iff)
BOT, TOP = Bot(), Top()


def conj(*fs: ModalFormula) -> ModalFormula:
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def box_n(f: ModalFormula, n: int) -> ModalFormula:
    for _ in range(n):
        f = Box(f)
    return f


def variables(f: ModalFormula) -> set[str]:
    if isinstance(f, PVar):
        return {f.name}
    if isinstance(f, (Not, Box)):
        return variables(f.body)
    if isinstance(f, BINARY):
        return variables(f.left) | variables(f.right)
    return set()


def subformulas(f: ModalFormula) -> Iterator[ModalFormula]:
    yield f
    if isinstance(f, (Not, Box)):
        yield from subformulas(f.body)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def modal_depth(f: ModalFormula) -> int:
    if isinstance(f, Box):
        return 1 + modal_depth(f.body)
    if isinstance(f, Not):
        return modal_depth(f.body)
    if isinstance(f, BINARY):
        return max(modal_depth(f.left), modal_depth(f.right))
    return 0


# --------------------------------------------------------------------------- parsing
class ModalSyntaxError(ValueError):
    def __init__(self, message: str, col: int):
        super().__init__(f"at column {col}: {message}")
        self.col = col


_TOK = re.compile(r"\s*(?:(<->|->|[()!&|])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokens(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOK.match(text, pos)
        if not m:
            raise ModalSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + 1)
        out.append((m.group(1) or m.group(2), m.start(m.lastindex) + 1))
        pos = m.end()
    out.append(("", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self) -> str:
        t = self.toks[self.i][0]
        self.i += 1
        return t

    def fail(self, msg: str):
        raise ModalSyntaxError(msg, self.toks[self.i][1])

    def parse(self) -> ModalFormula:
        f = self.iff()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")
        return f

    def iff(self):
        left = self.imp()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        t = self.peek()
        if t == "!":
            self.take()
            return Not(self.unary())
        if t == "box":
            self.take()
            return Box(self.unary())
        if t == "(":
            self.take()
            f = self.iff()
            if self.take() != ")":
                self.i -= 1
                self.fail("expected ')'")
            return f
        if t == "false":
            self.take()
            return BOT
        if t == "true":
            self.take()
            return TOP
        if t and (t[0].isalpha() or t[0] == "_"):
            self.take()
            return PVar(t)
        self.fail(f"expected a formula, found {t or 'end of input'!r}")


def parse_modal(text: str) -> ModalFormula:
    return _Parser(text).parse()


_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Imp: "->", Or: "|", And: "&"}


def show(f: ModalFormula, ctx: int = 0) -> str:
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Top):
        return "true"
    if isinstance(f, PVar):
        return f.name
    if isinstance(f, Not):
        return "!" + show(f.body, 5)
    if isinstance(f, Box):
        return "box " + show(f.body, 5)
    p = _PREC[type(f)]
    if isinstance(f, Imp):
        s = f"{show(f.left, p + 1)} -> {show(f.right, p)}"
    else:
        s = f"{show(f.left, p)} {_SYM[type(f)]} {show(f.right, p + 1)}"
    return f"({s})" if ctx > p else s


def random_modal(rng: np.random.Generator, depth: int, names=("p", "q")) -> ModalFormula:
    """Random formula of nesting depth at most ``depth`` over the given variables."""
    if depth <= 0 or rng.random() < 0.15:
        r = rng.random()
        if r < 0.1:
            return BOT
        if r < 0.15:
            return TOP
        return PVar(names[rng.integers(len(names))])
    r = rng.random()
    if r < 0.3:
        return Box(random_modal(rng, depth - 1, names))
    if r < 0.45:
        return Not(random_modal(rng, depth - 1, names))
    cls = (And, Or, Imp, Imp, Iff)[rng.integers(5)]
    return cls(random_modal(rng, depth - 1, names), random_modal(rng, depth - 1, names))
