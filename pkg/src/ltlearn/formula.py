"""LTL syntax trees over the U-free fragment, with a parser and printer.

Learned formulas keep negation on atoms only.  ``Not`` and ``Implies`` exist
so that user input can be parsed; :func:`to_nnf` removes them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "FormulaSyntaxError",
    "UnsupportedOperatorError",
    "Formula",
    "Atom",
    "NegAtom",
    "Top",
    "Bottom",
    "Last",
    "And",
    "Or",
    "Next",
    "Finally",
    "Globally",
    "Not",
    "Implies",
    "TRUE",
    "FALSE",
    "LAST",
    "formula_size",
    "atoms",
    "is_nnf",
    "conj",
    "disj",
    "next_n",
    "parse_formula",
    "print_formula",
    "to_nnf",
    "negate",
]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnsupportedOperatorError(ValueError):
    """Raised for operators outside the fragment (U, R, past-time)."""


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Last(Formula):
    """Holds exactly at the final position; stands for ``!X true``."""


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class Implies(Formula):
    left: Formula
    right: Formula


TRUE = Top()
FALSE = Bottom()
LAST = Last()

_UNARY = (Next, Finally, Globally, Not)
_BINARY = (And, Or, Implies)


def formula_size(f: Formula) -> int:
    """Syntax-tree node count; ``!p`` counts 2 and ``last`` counts 3."""
    if isinstance(f, (Atom, Top, Bottom)):
        return 1
    if isinstance(f, NegAtom):
        return 2
    if isinstance(f, Last):
        return 3
    if isinstance(f, _UNARY):
        return 1 + formula_size(f.arg)
    if isinstance(f, _BINARY):
        return 1 + formula_size(f.left) + formula_size(f.right)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> set[str]:
    if isinstance(f, (Atom, NegAtom)):
        return {f.name}
    if isinstance(f, _UNARY):
        return atoms(f.arg)
    if isinstance(f, _BINARY):
        return atoms(f.left) | atoms(f.right)
    return set()


def is_nnf(f: Formula) -> bool:
    if isinstance(f, (Not, Implies)):
        return False
    if isinstance(f, _UNARY):
        return is_nnf(f.arg)
    if isinstance(f, _BINARY):
        return is_nnf(f.left) and is_nnf(f.right)
    return True


def conj(parts) -> Formula:
    """Left-nested conjunction; ``true`` when empty."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def next_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Next(f)
    return f


# -- negation normal form ----------------------------------------------------

def negate(f: Formula) -> Formula:
    """NNF of ``!f`` using the finite-trace dualities (``!X f = last | X !f``)."""
    return to_nnf(Not(f))


def to_nnf(f: Formula) -> Formula:
    if isinstance(f, (Atom, NegAtom, Top, Bottom, Last)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Implies):
        return Or(_push_not(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.arg))
    if isinstance(f, Finally):
        return Finally(to_nnf(f.arg))
    if isinstance(f, Globally):
        return Globally(to_nnf(f.arg))
    if isinstance(f, Not):
        return _push_not(f.arg)
    raise UnsupportedOperatorError(f"cannot normalise {f!r}")


def _push_not(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return NegAtom(f.name)
    if isinstance(f, NegAtom):
        return Atom(f.name)
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Last):
        return Next(TRUE)
    if isinstance(f, Not):
        return to_nnf(f.arg)
    if isinstance(f, And):
        return Or(_push_not(f.left), _push_not(f.right))
    if isinstance(f, Or):
        return And(_push_not(f.left), _push_not(f.right))
    if isinstance(f, Implies):
        return And(to_nnf(f.left), _push_not(f.right))
    if isinstance(f, Next):
        if isinstance(f.arg, Top):
            return LAST
        return Or(LAST, Next(_push_not(f.arg)))
    if isinstance(f, Finally):
        return Globally(_push_not(f.arg))
    if isinstance(f, Globally):
        return Finally(_push_not(f.arg))
    raise UnsupportedOperatorError(f"cannot negate {f!r}")


# -- printing ----------------------------------------------------------------

# binding strength: higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3}
_OPS = {Implies: "->", Or: "|", And: "&"}
_UNARY_OPS = {Next: "X", Finally: "F", Globally: "G", Not: "!"}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def print_formula(f: Formula) -> str:
    """Minimal-parenthesis rendering; ``&`` and ``|`` associate to the left."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "!" + f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Last):
        return "!X true"
    if isinstance(f, _UNARY):
        op = _UNARY_OPS[type(f)]
        inner = print_formula(f.arg)
        if _prec(f.arg) < 4 or isinstance(f.arg, Last):
            return f"{op}({inner})"
        if op == "!":
            return "!" + inner
        return f"{op} {inner}"
    if isinstance(f, _BINARY):
        p = _prec(f)
        left, right = print_formula(f.left), print_formula(f.right)
        if isinstance(f, Implies):
            # right-associative
            if _prec(f.left) <= p:
                left = f"({left})"
            if _prec(f.right) < p:
                right = f"({right})"
        else:
            if _prec(f.left) < p:
                left = f"({left})"
            if _prec(f.right) <= p:
                right = f"({right})"
        return f"{left} {_OPS[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->|=>)|([!~&|()])|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"X", "F", "G", "U", "R", "W", "true", "false", "last"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            while text[pos].isspace():
                pos += 1
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        start = m.start(m.lastindex)
        if tok == "=>":
            tok = "->"
        if tok == "~":
            tok = "!"
        tokens.append((tok, start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "<end>":
            self._check_unsupported()
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.pos())
        return f

    def _check_unsupported(self):
        if self.peek() in ("U", "R", "W"):
            raise UnsupportedOperatorError(
                f"operator {self.peek()} at position {self.pos()} is outside the supported fragment"
            )

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        self._check_unsupported()
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("X", "F", "G"):
            self.take()
            arg = self.unary()
            return {"X": Next, "F": Finally, "G": Globally}[tok](arg)
        if tok == "(":
            self.take()
            f = self.implication()
            self.take(")")
            return f
        if tok in ("U", "R", "W"):
            self._check_unsupported()
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok == "last":
            self.take()
            return LAST
        if tok == "<end>" or tok in "&|)" or tok == "->":
            raise FormulaSyntaxError(f"expected a formula, found {tok!r}", self.pos())
        self.take()
        return Atom(tok)


def parse_formula(text: str, *, nnf: bool = True) -> Formula:
    """Parse ``text``; with ``nnf`` (default) sugar is eliminated by :func:`to_nnf`."""
    f = _Parser(text).parse()
    return to_nnf(f) if nnf else f
