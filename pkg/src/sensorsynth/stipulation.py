"""Belief stipulations: boolean predicates over belief state-sets.

Textual syntax (grammar version 1)::

    formula := "true" | "false"
             | "and(" formula {"," formula} ")"
             | "or(" formula {"," formula} ")"
             | "not(" formula ")"
             | "contains(" state ")"
             | "subset-of(" state {"," state} ")"
             | "disjoint-from(" state {"," state} ")"
             | "size-at-most(" integer ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable

from .errors import StipulationError
from .pgraph import sorted_symbols

GRAMMAR_VERSION = 1


class Formula:
    def __call__(self, belief) -> bool:
        return evaluate(self, belief)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class And(Formula):
    items: tuple


@dataclass(frozen=True)
class Or(Formula):
    items: tuple


@dataclass(frozen=True)
class Not(Formula):
    item: Formula


@dataclass(frozen=True)
class Contains(Formula):
    state: Hashable


@dataclass(frozen=True)
class SubsetOf(Formula):
    states: frozenset


@dataclass(frozen=True)
class DisjointFrom(Formula):
    states: frozenset


@dataclass(frozen=True)
class SizeAtMost(Formula):
    n: int


TRUE = Const(True)
FALSE = Const(False)


def evaluate(formula: Formula, belief) -> bool:
    """Evaluate ``formula`` on a belief (a set of world states)."""
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, And):
        return all(evaluate(f, belief) for f in formula.items)
    if isinstance(formula, Or):
        return any(evaluate(f, belief) for f in formula.items)
    if isinstance(formula, Not):
        return not evaluate(formula.item, belief)
    if isinstance(formula, Contains):
        return formula.state in belief
    if isinstance(formula, SubsetOf):
        return frozenset(belief) <= formula.states
    if isinstance(formula, DisjointFrom):
        return formula.states.isdisjoint(belief)
    if isinstance(formula, SizeAtMost):
        return len(belief) <= formula.n
    raise TypeError(f"not a stipulation formula: {formula!r}")


def referenced_states(formula: Formula) -> frozenset:
    if isinstance(formula, (And, Or)):
        return frozenset().union(*(referenced_states(f) for f in formula.items))
    if isinstance(formula, Not):
        return referenced_states(formula.item)
    if isinstance(formula, Contains):
        return frozenset([formula.state])
    if isinstance(formula, (SubsetOf, DisjointFrom)):
        return formula.states
    return frozenset()


def validate_states(formula: Formula, states) -> None:
    unknown = referenced_states(formula) - frozenset(states)
    if unknown:
        raise StipulationError(f"unknown state(s) in stipulation: {sorted_symbols(unknown)}")


def to_text(formula: Formula) -> str:
    if isinstance(formula, Const):
        return "true" if formula.value else "false"
    if isinstance(formula, And):
        return "and(" + ", ".join(map(to_text, formula.items)) + ")"
    if isinstance(formula, Or):
        return "or(" + ", ".join(map(to_text, formula.items)) + ")"
    if isinstance(formula, Not):
        return f"not({to_text(formula.item)})"
    if isinstance(formula, Contains):
        return f"contains({formula.state})"
    if isinstance(formula, SubsetOf):
        return "subset-of(" + ", ".join(map(str, sorted_symbols(formula.states))) + ")"
    if isinstance(formula, DisjointFrom):
        return "disjoint-from(" + ", ".join(map(str, sorted_symbols(formula.states))) + ")"
    if isinstance(formula, SizeAtMost):
        return f"size-at-most({formula.n})"
    raise TypeError(f"not a stipulation formula: {formula!r}")


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<word>[^\s(),]+))")
_STATE_ATOMS = {"subset-of": SubsetOf, "disjoint-from": DisjointFrom}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise StipulationError(f"unexpected character at offset {pos}")
                break
            tok = m.group("punct") or m.group("word")
            self.tokens.append((tok, m.start(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        if self.i >= len(self.tokens):
            raise StipulationError(f"unexpected end of stipulation, expected {expected or 'a token'}")
        tok, off = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise StipulationError(f"expected {expected!r} at offset {off}, found {tok!r}")
        self.i += 1
        return tok

    def args(self, item):
        self.take("(")
        out = [item()]
        while self.peek() == ",":
            self.take(",")
            out.append(item())
        self.take(")")
        return out

    def word(self):
        tok = self.take()
        if tok in "(),":
            raise StipulationError(f"expected a name, found {tok!r}")
        return tok

    def formula(self):
        head = self.word()
        if head == "true":
            return TRUE
        if head == "false":
            return FALSE
        if head in ("and", "or"):
            items = tuple(self.args(self.formula))
            return And(items) if head == "and" else Or(items)
        if head == "not":
            items = self.args(self.formula)
            if len(items) != 1:
                raise StipulationError("not() takes exactly one formula")
            return Not(items[0])
        if head == "contains":
            states = self.args(self.word)
            if len(states) != 1:
                raise StipulationError("contains() takes exactly one state")
            return Contains(states[0])
        if head in _STATE_ATOMS:
            return _STATE_ATOMS[head](frozenset(self.args(self.word)))
        if head == "size-at-most":
            args = self.args(self.word)
            n = args[0] if len(args) == 1 else ""
            if not n.isdigit():
                raise StipulationError(f"size-at-most() needs a non-negative integer, got {n!r}")
            return SizeAtMost(int(n))
        raise StipulationError(f"unknown stipulation atom {head!r}")


def _resolve(formula, names):
    """Replace state tokens by the world states whose ``str`` they spell."""

    def one(tok):
        return names.get(tok, tok)

    if isinstance(formula, (And, Or)):
        return type(formula)(tuple(_resolve(f, names) for f in formula.items))
    if isinstance(formula, Not):
        return Not(_resolve(formula.item, names))
    if isinstance(formula, Contains):
        return Contains(one(formula.state))
    if isinstance(formula, (SubsetOf, DisjointFrom)):
        return type(formula)(frozenset(map(one, formula.states)))
    return formula


def parse(text: str, states=None) -> Formula:
    """Parse stipulation text.

    If ``states`` is given, state tokens are resolved to the states whose
    string form they match (so ``3`` names the integer state 3) and
    unknown references are rejected.
    """
    p = _Parser(text)
    formula = p.formula()
    if p.peek() is not None:
        raise StipulationError(f"trailing input after formula: {p.peek()!r}")
    if states is not None:
        names = {}
        for s in states:
            if str(s) in names and names[str(s)] != s:
                raise StipulationError(f"states {names[str(s)]!r} and {s!r} share the name {str(s)!r}")
            names[str(s)] = s
        formula = _resolve(formula, names)
        validate_states(formula, states)
    return formula
