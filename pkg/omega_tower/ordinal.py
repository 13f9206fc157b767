"""Ordinal notations below epsilon-zero in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents, denoting ``w^e1*c1 + w^e2*c2 + ...``; the empty tuple
is zero. Text form::

    0    3    w    w*2 + 1    w^2 + w*3 + 5    w^w    w^(w + 1)*2
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import List, Tuple, Union

from .errors import CnfViolation, NotALimitError, OrdinalParseError


class Comparison(enum.Enum):
    LESS = "LESS"
    EQUAL = "EQUAL"
    GREATER = "GREATER"


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: Tuple[Tuple["Ordinal", int], ...] = ()

    def is_zero(self) -> bool:
        return not self.terms

    def __lt__(self, other: "Ordinal") -> bool:
        return compare(self, other) is Comparison.LESS

    def __str__(self) -> str:
        return print_ordinal(self)


ZERO = Ordinal()


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    return Ordinal(((ZERO, n),)) if n else ZERO


def omega_power(exponent: Ordinal, coefficient: int = 1) -> Ordinal:
    if coefficient < 1:
        return ZERO
    return Ordinal(((exponent, coefficient),))


ONE = from_int(1)
OMEGA = omega_power(ONE)


def omega_tower(height: int) -> Ordinal:
    """``w^w^...^w`` with ``height`` omegas (``omega_tower(0)`` is 1)."""
    result = ONE
    for _ in range(height):
        result = omega_power(result)
    return result


def as_finite(a: Ordinal) -> int | None:
    if a.is_zero():
        return 0
    if len(a.terms) == 1 and a.terms[0][0].is_zero():
        return a.terms[0][1]
    return None


# ---------------------------------------------------------------- order


def compare(a: Ordinal, b: Ordinal) -> Comparison:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c is not Comparison.EQUAL:
            return c
        if ca != cb:
            return Comparison.LESS if ca < cb else Comparison.GREATER
    if len(a.terms) == len(b.terms):
        return Comparison.EQUAL
    return Comparison.LESS if len(a.terms) < len(b.terms) else Comparison.GREATER


def is_valid_cnf(a: Ordinal) -> bool:
    for i, (exponent, coefficient) in enumerate(a.terms):
        if not isinstance(coefficient, int) or coefficient < 1 or not is_valid_cnf(exponent):
            return False
        if i and compare(a.terms[i - 1][0], exponent) is not Comparison.GREATER:
            return False
    return True


# ---------------------------------------------------------------- structure


@dataclass(frozen=True)
class ZeroClass:
    pass


@dataclass(frozen=True)
class Successor:
    predecessor: Ordinal


@dataclass(frozen=True)
class Limit:
    pass


Classification = Union[ZeroClass, Successor, Limit]


def classify(a: Ordinal) -> Classification:
    if a.is_zero():
        return ZeroClass()
    *head, (exponent, coefficient) = a.terms
    if not exponent.is_zero():
        return Limit()
    if coefficient > 1:
        head.append((exponent, coefficient - 1))
    return Successor(Ordinal(tuple(head)))


def successor(a: Ordinal) -> Ordinal:
    if a.terms and a.terms[-1][0].is_zero():
        return Ordinal(a.terms[:-1] + ((ZERO, a.terms[-1][1] + 1),))
    return Ordinal(a.terms + ((ZERO, 1),))


def _append(prefix: Tuple[Tuple[Ordinal, int], ...], tail: Ordinal) -> Ordinal:
    return Ordinal(prefix + tail.terms)


def fundamental_sequence(limit: Ordinal, n: int) -> Ordinal:
    """The n-th element of the standard sequence converging to ``limit``.

    With ``limit = delta + w^a*c``: for c > 1 the result is
    ``delta + w^a*(c-1) + (w^a)[n]``; for a successor exponent ``a'+1`` it is
    ``delta + w^a'*n``; for a limit exponent it is ``delta + w^(a[n])``.
    """
    if not isinstance(classify(limit), Limit):
        raise NotALimitError(f"{print_ordinal(limit)} is not a limit ordinal")
    if n < 0:
        raise ValueError("sequence index must be a natural number")
    *head, (exponent, coefficient) = limit.terms
    delta = tuple(head)
    if coefficient > 1:
        return _append(delta + ((exponent, coefficient - 1),), fundamental_sequence(omega_power(exponent), n))
    shape = classify(exponent)
    if isinstance(shape, Successor):
        return _append(delta, omega_power(shape.predecessor, n))
    return _append(delta, omega_power(fundamental_sequence(exponent, n)))


# ---------------------------------------------------------------- text


def _print_exponent_atom(exponent: Ordinal) -> str:
    finite = as_finite(exponent)
    if finite is not None:
        return str(finite)
    if exponent == OMEGA:
        return "w"
    return f"({print_ordinal(exponent)})"


def _print_term(exponent: Ordinal, coefficient: int) -> str:
    if exponent.is_zero():
        return str(coefficient)
    base = "w" if exponent == ONE else f"w^{_print_exponent_atom(exponent)}"
    return base if coefficient == 1 else f"{base}*{coefficient}"


def print_ordinal(a: Ordinal) -> str:
    if a.is_zero():
        return "0"
    return " + ".join(_print_term(e, c) for e, c in a.terms)


_TOKEN = re.compile(r"\s*(?:([0-9]+)|(w)|(\^)|(\*)|(\+)|(\()|(\)))")


class _OrdinalParser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                raise OrdinalParseError(f"unexpected character {stripped[pos]!r}", 1, pos + 1)
            kind = ("nat", "w", "^", "*", "+", "(", ")")[m.lastindex - 1]
            self.tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
            pos = m.end()
        self.index = 0
        self.depth = 0

    def peek(self) -> str | None:
        return self.tokens[self.index][0] if self.index < len(self.tokens) else None

    def take(self, kind: str) -> Tuple[str, str, int]:
        if self.peek() != kind:
            column = self.tokens[self.index][2] if self.index < len(self.tokens) else len(self.text) + 1
            raise OrdinalParseError(f"expected '{kind}'", 1, column)
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def nat(self) -> int:
        _, text, column = self.take("nat")
        if len(text) > 1 and text[0] == "0":
            raise OrdinalParseError(f"leading zero in '{text}'", 1, column)
        if len(text) > 4000:
            raise OrdinalParseError("number too large", 1, column)
        return int(text)

    def ordinal(self) -> Ordinal:
        self.depth += 1
        if self.depth > 256:
            raise OrdinalParseError("nesting too deep", 1, 1)
        column = self.tokens[self.index][2] if self.index < len(self.tokens) else 1
        if self.peek() == "nat" and self.tokens[self.index][1] == "0":
            self.index += 1
            self.depth -= 1
            return ZERO
        terms = [self.term()]
        while self.peek() == "+":
            self.index += 1
            terms.append(self.term())
        for i in range(1, len(terms)):
            if compare(terms[i - 1][0], terms[i][0]) is not Comparison.GREATER:
                raise CnfViolation("exponents must be strictly decreasing", 1, column)
        self.depth -= 1
        return Ordinal(tuple(terms))

    def term(self) -> Tuple[Ordinal, int]:
        if self.peek() == "nat":
            column = self.tokens[self.index][2]
            value = self.nat()
            if value == 0:
                raise CnfViolation("zero term inside a sum", 1, column)
            return ZERO, value
        self.take("w")
        exponent = ONE
        if self.peek() == "^":
            self.index += 1
            exponent = self.atom()
        coefficient = 1
        if self.peek() == "*":
            _, _, column = self.take("*")
            coefficient = self.nat()
            if coefficient == 0:
                raise CnfViolation("coefficients must be positive", 1, column)
        return exponent, coefficient

    def atom(self) -> Ordinal:
        kind = self.peek()
        if kind == "nat":
            return from_int(self.nat())
        if kind == "w":
            self.index += 1
            return OMEGA
        self.take("(")
        inner = self.ordinal()
        self.take(")")
        return inner


def parse_ordinal(text: str) -> Ordinal:
    parser = _OrdinalParser(text)
    if not parser.tokens:
        raise OrdinalParseError("empty ordinal", 1, 1)
    result = parser.ordinal()
    if parser.index != len(parser.tokens):
        raise OrdinalParseError("trailing input", 1, parser.tokens[parser.index][2])
    return result
