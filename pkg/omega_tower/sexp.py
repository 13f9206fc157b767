"""Minimal S-expression reader/printer used by every text grammar.

Atoms are bare tokens (``[^\\s()"]+``), strings are double-quoted with
backslash escapes for ``"`` and ``\\`` only. Each node remembers the
line/column it started at so grammar errors can point at it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Union

from .errors import ParseError

MAX_DEPTH = 512

# Decimal conversion chunk; must stay under the default 4300-digit int/str limit.
DIGIT_CHUNK = 1000
_CHUNK_BASE = 10**DIGIT_CHUNK


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)


@dataclass(frozen=True)
class String:
    text: str
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


Node = Union[Atom, String, SList]


def escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def quote(text: str) -> str:
    return '"' + escape(text) + '"'


def nat_text(n: int) -> str:
    """Decimal text of a natural number of any size."""
    if n < _CHUNK_BASE:
        return str(n)
    chunks: List[int] = []
    while n:
        n, low = divmod(n, _CHUNK_BASE)
        chunks.append(low)
    head = str(chunks.pop())
    return head + "".join(f"{c:0{DIGIT_CHUNK}d}" for c in reversed(chunks))


def nat_value(digits: str) -> int:
    n = 0
    for start in range(0, len(digits), DIGIT_CHUNK):
        chunk = digits[start : start + DIGIT_CHUNK]
        n = n * 10 ** len(chunk) + int(chunk)
    return n


def read(text: str) -> Node:
    """Read exactly one S-expression from ``text``."""
    reader = _Reader(text)
    node = reader.read_node()
    reader.skip_ws()
    if not reader.at_end():
        raise ParseError("trailing input", reader.line, reader.column)
    return node


class _Reader:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def skip_ws(self) -> None:
        while not self.at_end() and self.text[self.pos] in " \t\r\n":
            self._advance()

    def read_node(self) -> Node:
        # explicit stack: fuzzed input must not exhaust host recursion
        stack: List[tuple[int, int, list]] = []
        while True:
            self.skip_ws()
            if self.at_end():
                raise ParseError("unexpected end of input", self.line, self.column)
            line, column = self.line, self.column
            ch = self.text[self.pos]
            if ch == "(":
                self._advance()
                if len(stack) >= MAX_DEPTH:
                    raise ParseError("nesting too deep", line, column)
                stack.append((line, column, []))
                continue
            if ch == ")":
                if not stack:
                    raise ParseError("unbalanced ')'", line, column)
                self._advance()
                l0, c0, items = stack.pop()
                node: Node = SList(tuple(items), l0, c0)
            elif ch == '"':
                node = self._read_string()
            else:
                node = self._read_atom()
            if not stack:
                return node
            stack[-1][2].append(node)

    def _read_string(self) -> String:
        line, column = self.line, self.column
        self._advance()
        out = []
        while True:
            if self.at_end():
                raise ParseError("unterminated string", line, column)
            ch = self._advance()
            if ch == '"':
                return String("".join(out), line, column)
            if ch == "\\":
                if self.at_end():
                    raise ParseError("unterminated string", line, column)
                nxt = self._advance()
                if nxt not in ('"', "\\"):
                    raise ParseError(f"bad escape '\\{nxt}'", self.line, self.column - 2)
                out.append(nxt)
            else:
                out.append(ch)

    def _read_atom(self) -> Atom:
        line, column = self.line, self.column
        start = self.pos
        while not self.at_end() and self.text[self.pos] not in ' \t\r\n()"':
            self._advance()
        return Atom(self.text[start:self.pos], line, column)


def expect_list(node: Node, head: str, arity: int | None = None, what: str = "form") -> SList:
    """Check that ``node`` is ``(head ...)`` with ``arity`` arguments after the head."""
    if not isinstance(node, SList) or node.head() != head:
        raise ParseError(f"expected ({head} ...) {what}", node.line, node.column)
    if arity is not None and len(node.items) - 1 != arity:
        raise ParseError(
            f"'{head}' takes {arity} argument(s), got {len(node.items) - 1}", node.line, node.column
        )
    return node


def expect_atom(node: Node, what: str) -> str:
    if not isinstance(node, Atom):
        raise ParseError(f"expected {what}", node.line, node.column)
    return node.text


def expect_string(node: Node, what: str) -> str:
    if not isinstance(node, String):
        raise ParseError(f"expected quoted {what}", node.line, node.column)
    return node.text


def expect_nat(node: Node, what: str = "natural number") -> int:
    text = expect_atom(node, what)
    if (
        not text.isascii()
        or not text.isdigit()
        or (len(text) > 1 and text[0] == "0")
    ):
        raise ParseError(f"expected {what}, got '{text}'", node.line, node.column)
    return nat_value(text)
