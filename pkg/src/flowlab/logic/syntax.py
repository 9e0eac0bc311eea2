"""Abstract syntax, parser and printer for the two-sorted trajectory language.

Concrete grammar (lowest precedence first)::

    formula  := disj [ '->' formula ]
    disj     := conj ( '|' conj )*
    conj     := unary ( '&' unary )*
    unary    := '!' unary | quant | primary
    quant    := ('forall' | 'exists') NAME [':' ('Time' | 'State')] '.' formula
    primary  := '(' formula ')' | 'true' | 'false'
              | 'X' '(' NAME ',' NAME ')'        -- X(time, state)
              | NAME '(' NAME ')'                -- state predicate
              | NAME '<' NAME                    -- time order
              | NAME '=' NAME                    -- equality, either sort

``->`` is right associative, ``&`` and ``|`` are left associative, and a
quantifier body extends as far right as possible. A binder without a sort
annotation gets its sort from how the variable is used in the body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

TIME = "Time"
STATE = "State"
SORTS = (TIME, STATE)


class FormulaError(ValueError):
    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{self.kind} error at {line}:{col}: {message}" if line else f"{self.kind} error: {message}")
        self.line, self.col = line, col
        self.detail = message


class LexError(FormulaError):
    kind = "lex"


class ParseError(FormulaError):
    kind = "parse"


class SortError(FormulaError):
    kind = "sort"


# --------------------------------------------------------------------------- AST
@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class XAtom:
    time: Var
    state: Var


@dataclass(frozen=True)
class Pred:
    name: str
    arg: Var


@dataclass(frozen=True)
class Less:
    left: Var
    right: Var


@dataclass(frozen=True)
class Eq:
    left: Var
    right: Var


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Const, XAtom, Pred, Less, Eq, Not, And, Or, Implies, Forall, Exists]
Binary = (And, Or, Implies)
Quantifier = (Forall, Exists)


def free_variables(f: Formula) -> set[Var]:
    if isinstance(f, Const):
        return set()
    if isinstance(f, XAtom):
        return {f.time, f.state}
    if isinstance(f, Pred):
        return {f.arg}
    if isinstance(f, (Less, Eq)):
        return {f.left, f.right}
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, Binary):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Quantifier):
        return {v for v in free_variables(f.body) if v.name != f.var.name}
    raise TypeError(f"not a formula: {f!r}")


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, Binary):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    if isinstance(f, Quantifier):
        return 1 + quantifier_depth(f.body)
    return 0


def size(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + size(f.body)
    if isinstance(f, Binary):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, Quantifier):
        return 1 + size(f.body)
    return 1


# --------------------------------------------------------------------------- lexer
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<punct>[()!&|<=,.:])
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)
KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str  # name | keyword | op | end
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise LexError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if m.lastgroup == "name":
            out.append(Token("keyword" if chunk in KEYWORDS else "name", chunk, line, col))
        elif m.lastgroup in ("arrow", "punct"):
            out.append(Token("op", chunk, line, col))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(Token("end", "", line, pos - line_start + 1))
    return out


# --------------------------------------------------------------------------- parser
# The parser builds nodes whose variables carry sort None (unresolved) together
# with source positions; _Resolver then fixes every sort.
@dataclass(frozen=True)
class _RawVar:
    name: str
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("op", "keyword"):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    def parse(self):
        f = self.implication()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r} after complete formula")
        return f

    def implication(self):
        left = self.disjunction()
        if self.tok.text == "->":
            self.advance()
            return ("->", left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.tok.text == "|":
            self.advance()
            left = ("|", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.tok.text == "&":
            self.advance()
            left = ("&", left, self.unary())
        return left

    def unary(self):
        t = self.tok
        if t.text == "!":
            self.advance()
            return ("!", self.unary())
        if t.kind == "keyword" and t.text in ("forall", "exists"):
            self.advance()
            var = self.variable()
            sort = None
            if self.tok.text == ":":
                self.advance()
                st = self.advance()
                if st.text not in SORTS:
                    raise ParseError(f"unknown sort {st.text!r} (expected Time or State)", st.line, st.col)
                sort = st.text
            self.expect(".")
            return (t.text, var, sort, self.implication(), t)
        return self.primary()

    def variable(self) -> _RawVar:
        t = self.tok
        if t.kind != "name":
            self.fail(f"expected a variable name, found {t.text or 'end of input'!r}")
        self.advance()
        return _RawVar(t.text, t.line, t.col)

    def primary(self):
        t = self.tok
        if t.text == "(":
            self.advance()
            f = self.implication()
            self.expect(")")
            return f
        if t.kind == "keyword" and t.text in ("true", "false"):
            self.advance()
            return ("const", t.text == "true")
        if t.kind != "name":
            self.fail(f"expected a formula, found {t.text or 'end of input'!r}")
        name = self.advance()
        if self.tok.text == "(":
            self.advance()
            a = self.variable()
            if name.text == "X":
                self.expect(",")
                b = self.variable()
                self.expect(")")
                return ("X", a, b, name)
            self.expect(")")
            return ("pred", name.text, a)
        if self.tok.text in ("<", "="):
            op = self.advance().text
            b = self.variable()
            return (op, _RawVar(name.text, name.line, name.col), b)
        self.fail(f"dangling name {name.text!r}: expected '(', '<' or '='")


class _Resolver:
    def __init__(self, free_sorts: dict[str, str]):
        self.scope: list[tuple[str, str]] = list(free_sorts.items())
        self.free_sorts = dict(free_sorts)

    def lookup(self, name: str) -> str | None:
        for n, s in reversed(self.scope):
            if n == name:
                return s
        return None

    def var(self, rv: _RawVar, want: str | None) -> Var:
        sort = self.lookup(rv.name)
        if sort is None:
            if want is None:
                raise SortError(f"cannot determine the sort of free variable {rv.name!r}", rv.line, rv.col)
            # first use of a free variable fixes its sort
            self.scope.insert(0, (rv.name, want))
            self.free_sorts[rv.name] = want
            sort = want
        if want is not None and sort != want:
            raise SortError(f"variable {rv.name!r} has sort {sort} but is used as {want}", rv.line, rv.col)
        return Var(rv.name, sort)

    def resolve(self, raw) -> Formula:
        tag = raw[0]
        if tag == "const":
            return Const(raw[1])
        if tag == "X":
            return XAtom(self.var(raw[1], TIME), self.var(raw[2], STATE))
        if tag == "pred":
            return Pred(raw[1], self.var(raw[2], STATE))
        if tag == "<":
            return Less(self.var(raw[1], TIME), self.var(raw[2], TIME))
        if tag == "=":
            a, b = raw[1], raw[2]
            sa, sb = self.lookup(a.name), self.lookup(b.name)
            sort = sa or sb
            if sort is None:
                raise SortError(f"cannot determine the sort of {a.name!r} = {b.name!r}", a.line, a.col)
            return Eq(self.var(a, sort), self.var(b, sort))
        if tag == "!":
            return Not(self.resolve(raw[1]))
        if tag in ("&", "|", "->"):
            cls = {"&": And, "|": Or, "->": Implies}[tag]
            return cls(self.resolve(raw[1]), self.resolve(raw[2]))
        if tag in ("forall", "exists"):
            _, rv, sort, body, tok = raw
            if sort is None:
                sort = self.infer(rv.name, body)
                if sort is None:
                    raise SortError(f"cannot infer the sort of bound variable {rv.name!r}; annotate it", rv.line, rv.col)
            self.scope.append((rv.name, sort))
            try:
                inner = self.resolve(body)
            finally:
                self.scope.pop()
            cls = Forall if tag == "forall" else Exists
            return cls(Var(rv.name, sort), inner)
        raise AssertionError(tag)

    def infer(self, name: str, raw) -> str | None:
        found = set(self._uses(name, raw))
        if len(found) > 1:
            raise SortError(f"variable {name!r} is used with both sorts")
        return found.pop() if found else None

    def _uses(self, name: str, raw) -> Iterator[str]:
        tag = raw[0]
        if tag == "X":
            if raw[1].name == name:
                yield TIME
            if raw[2].name == name:
                yield STATE
        elif tag == "pred":
            if raw[2].name == name:
                yield STATE
        elif tag == "<":
            if name in (raw[1].name, raw[2].name):
                yield TIME
        elif tag == "=":
            a, b = raw[1].name, raw[2].name
            if a == name and b != name and self.lookup(b):
                yield self.lookup(b)
            if b == name and a != name and self.lookup(a):
                yield self.lookup(a)
        elif tag == "!":
            yield from self._uses(name, raw[1])
        elif tag in ("&", "|", "->"):
            yield from self._uses(name, raw[1])
            yield from self._uses(name, raw[2])
        elif tag in ("forall", "exists"):
            if raw[1].name != name:
                yield from self._uses(name, raw[3])


def parse_formula(text: str, free: dict[str, str] | None = None) -> Formula:
    """Parse and sort-check a formula. ``free`` pre-declares sorts of free variables."""
    raw = _Parser(text).parse()
    return _Resolver(free or {}).resolve(raw)


# --------------------------------------------------------------------------- printer
_PREC = {Implies: 1, Or: 2, And: 3}
_OPS = {Implies: "->", Or: "|", And: "&"}


def pretty(f: Formula, ctx: int = 0) -> str:
    """Render with binder sorts always annotated; parse(pretty(f)) == f."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, XAtom):
        return f"X({f.time.name},{f.state.name})"
    if isinstance(f, Pred):
        return f"{f.name}({f.arg.name})"
    if isinstance(f, Less):
        return f"{f.left.name} < {f.right.name}"
    if isinstance(f, Eq):
        return f"{f.left.name} = {f.right.name}"
    if isinstance(f, Not):
        return "!" + pretty(f.body, 4)
    if isinstance(f, Binary):
        p = _PREC[type(f)]
        if isinstance(f, Implies):
            s = f"{pretty(f.left, p + 1)} -> {pretty(f.right, p)}"
        else:
            s = f"{pretty(f.left, p)} {_OPS[type(f)]} {pretty(f.right, p + 1)}"
        return f"({s})" if ctx > p else s
    if isinstance(f, Quantifier):
        q = "forall" if isinstance(f, Forall) else "exists"
        s = f"{q} {f.var.name}:{f.var.sort} . {pretty(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")
