"""Termination certificates and the decidable base checker.

Base certificates are purely syntactic:

* ``(loopfree)`` - the program has no ``while`` and no ``apply``.
* ``(ranking ((path 1) (var n) (dec 1)) ...)`` - every loop counts a
  natural-number variable down: guard ``(lt (nat 0) (var n))``, last body
  statement ``(set n (sub (var n) (nat k)))``, no other assignment to ``n``
  inside the loop.

The remaining forms (diagonal, reflection, left, right, singleton) are only
meaningful to the verifier tower and are rejected here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple, Union

from . import lang, sexp
from .errors import ParseError
from .lang import BinOp, If, NatLit, Program, Set, Stmt, Var, While
from .sexp import SList

Path = Tuple[int, ...]

MAX_CERT_DEPTH = 64


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class LoopFree:
    pass


@dataclass(frozen=True)
class Clause:
    path: Path
    var: str
    dec: int


@dataclass(frozen=True)
class Ranking:
    clauses: Tuple[Clause, ...]


@dataclass(frozen=True)
class Diagonal:
    vdesc_text: str


@dataclass(frozen=True)
class Reflection:
    ord_text: str
    inner: "Certificate"


@dataclass(frozen=True)
class LeftCert:
    inner: "Certificate"


@dataclass(frozen=True)
class RightCert:
    inner: "Certificate"


@dataclass(frozen=True)
class SingletonCert:
    pass


Certificate = Union[LoopFree, Ranking, Diagonal, Reflection, LeftCert, RightCert, SingletonCert]


class RejectReason(str, enum.Enum):
    NOT_BASE_CERTIFICATE = "not-base-certificate"
    CONTAINS_APPLY = "contains-apply"
    CONTAINS_WHILE = "contains-while"
    BAD_DECREMENT = "bad-decrement"
    DUPLICATE_PATH = "duplicate-path"
    BAD_PATH = "bad-path"
    UNCOVERED_LOOP = "uncovered-loop"
    GUARD_SHAPE = "guard-shape"
    DECREMENT_SHAPE = "decrement-shape"
    VARIABLE_REASSIGNED = "variable-reassigned"
    BAD_DESCRIPTOR = "bad-descriptor"
    NOT_TOWER_DESCRIPTOR = "not-tower-descriptor"
    BAD_ORDINAL = "bad-ordinal"
    LEVEL_NOT_BELOW = "level-not-below"
    NOT_DIAGONAL_PROGRAM = "not-diagonal-program"
    PROGRAM_MISMATCH = "program-mismatch"
    WRONG_CERTIFICATE = "wrong-certificate"
    TOO_DEEP = "too-deep"


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    reason: Optional[RejectReason] = None
    locus: Optional[Path] = None

    def __str__(self) -> str:
        return "ACCEPT" if self.accepted else f"REJECT {self.reason.value}"


ACCEPT = CheckResult(True)


def reject(reason: RejectReason, locus: Optional[Path] = None) -> CheckResult:
    return CheckResult(False, reason, locus)


# ---------------------------------------------------------------- text


def _cert(node: sexp.Node, depth: int) -> Certificate:
    if depth > MAX_CERT_DEPTH:
        raise ParseError("certificate nesting too deep", node.line, node.column)
    if not isinstance(node, SList) or node.head() is None:
        raise ParseError("expected certificate", node.line, node.column)
    head = node.head()
    args = node.items[1:]
    if head == "loopfree":
        sexp.expect_list(node, head, 0)
        return LoopFree()
    if head == "singleton":
        sexp.expect_list(node, head, 0)
        return SingletonCert()
    if head == "ranking":
        if not args:
            raise ParseError("ranking needs at least one clause", node.line, node.column)
        return Ranking(tuple(_clause(c) for c in args))
    if head == "diagonal":
        sexp.expect_list(node, head, 1)
        return Diagonal(sexp.expect_string(args[0], "verifier descriptor"))
    if head == "reflection":
        sexp.expect_list(node, head, 2)
        return Reflection(sexp.expect_string(args[0], "ordinal"), _cert(args[1], depth + 1))
    if head in ("left", "right"):
        sexp.expect_list(node, head, 1)
        inner = _cert(args[0], depth + 1)
        return LeftCert(inner) if head == "left" else RightCert(inner)
    raise ParseError(f"unknown certificate '{head}'", node.line, node.column)


def _clause(node: sexp.Node) -> Clause:
    if not isinstance(node, SList) or len(node.items) != 3:
        raise ParseError("expected ((path ...) (var NAME) (dec K))", node.line, node.column)
    path_node, var_node, dec_node = node.items
    sexp.expect_list(path_node, "path", what="clause path")
    path = tuple(sexp.expect_nat(i, "path index") for i in path_node.items[1:])
    sexp.expect_list(var_node, "var", 1)
    var = lang.ident_from_sexp(var_node.items[1])
    sexp.expect_list(dec_node, "dec", 1)
    dec = sexp.expect_nat(dec_node.items[1], "decrement")
    if dec < 1:
        raise ParseError("decrement must be at least 1", dec_node.line, dec_node.column)
    return Clause(path, var, dec)


def parse_certificate(text: str) -> Certificate:
    return _cert(sexp.read(text), 0)


def print_certificate(cert: Certificate) -> str:
    if isinstance(cert, LoopFree):
        return "(loopfree)"
    if isinstance(cert, SingletonCert):
        return "(singleton)"
    if isinstance(cert, Ranking):
        clauses = " ".join(
            f"((path{''.join(' ' + str(i) for i in c.path)}) (var {c.var}) (dec {c.dec}))" for c in cert.clauses
        )
        return f"(ranking {clauses})"
    if isinstance(cert, Diagonal):
        return f"(diagonal {sexp.quote(cert.vdesc_text)})"
    if isinstance(cert, Reflection):
        return f"(reflection {sexp.quote(cert.ord_text)} {print_certificate(cert.inner)})"
    if isinstance(cert, LeftCert):
        return f"(left {print_certificate(cert.inner)})"
    if isinstance(cert, RightCert):
        return f"(right {print_certificate(cert.inner)})"
    raise TypeError(f"not a certificate: {cert!r}")


# ---------------------------------------------------------------- paths


def iter_while_paths(stmts: Tuple[Stmt, ...], prefix: Path = ()) -> Iterator[Tuple[Path, While]]:
    """Yield every loop with its path; an ``if`` contributes (branch, index)."""
    for i, stmt in enumerate(stmts):
        here = prefix + (i,)
        if isinstance(stmt, While):
            yield here, stmt
            yield from iter_while_paths(stmt.body, here)
        elif isinstance(stmt, If):
            yield from iter_while_paths(stmt.then, here + (0,))
            yield from iter_while_paths(stmt.orelse, here + (1,))


def resolve_path(program: Program, path: Path) -> Optional[While]:
    stmts = program.body
    rest = path
    while rest:
        i = rest[0]
        if i >= len(stmts):
            return None
        stmt = stmts[i]
        rest = rest[1:]
        if not rest:
            return stmt if isinstance(stmt, While) else None
        if isinstance(stmt, While):
            stmts = stmt.body
        elif isinstance(stmt, If) and rest[0] in (0, 1):
            stmts = stmt.then if rest[0] == 0 else stmt.orelse
            rest = rest[1:]
        else:
            return None
    return None


def _guard_for(var: str) -> BinOp:
    return BinOp("lt", NatLit(0), Var(var))


def _decrement_for(var: str, dec: int) -> Set:
    return Set(var, BinOp("sub", Var(var), NatLit(dec)))


# ---------------------------------------------------------------- checking


def check_base_certificate(cert: Certificate, program: Program) -> CheckResult:
    if isinstance(cert, LoopFree):
        if lang.contains_apply(program):
            return reject(RejectReason.CONTAINS_APPLY)
        if lang.contains_while(program):
            return reject(RejectReason.CONTAINS_WHILE)
        return ACCEPT
    if not isinstance(cert, Ranking):
        return reject(RejectReason.NOT_BASE_CERTIFICATE)
    if lang.contains_apply(program):
        return reject(RejectReason.CONTAINS_APPLY)

    by_path: Dict[Path, Clause] = {}
    for clause in cert.clauses:
        if clause.dec < 1:
            return reject(RejectReason.BAD_DECREMENT, clause.path)
        if clause.path in by_path:
            return reject(RejectReason.DUPLICATE_PATH, clause.path)
        by_path[clause.path] = clause
    for path in by_path:
        if resolve_path(program, path) is None:
            return reject(RejectReason.BAD_PATH, path)
    for path, _ in iter_while_paths(program.body):
        if path not in by_path:
            return reject(RejectReason.UNCOVERED_LOOP, path)

    for clause in cert.clauses:
        loop = resolve_path(program, clause.path)
        if loop.guard != _guard_for(clause.var):
            return reject(RejectReason.GUARD_SHAPE, clause.path)
        if not loop.body or loop.body[-1] != _decrement_for(clause.var, clause.dec):
            return reject(RejectReason.DECREMENT_SHAPE, clause.path)
        for stmt in lang.iter_stmts(loop.body[:-1]):
            if isinstance(stmt, Set) and stmt.name == clause.var:
                return reject(RejectReason.VARIABLE_REASSIGNED, clause.path)
    return ACCEPT


def infer_certificate(program: Program) -> Optional[Certificate]:
    """Find a base certificate by pattern matching, or ``None``."""
    if check_base_certificate(LoopFree(), program).accepted:
        return LoopFree()
    clauses = []
    for path, loop in iter_while_paths(program.body):
        guard = loop.guard
        if not (
            isinstance(guard, BinOp)
            and guard.op == "lt"
            and guard.left == NatLit(0)
            and isinstance(guard.right, Var)
        ):
            return None
        var = guard.right.name
        last = loop.body[-1] if loop.body else None
        if not (
            isinstance(last, Set)
            and last.name == var
            and isinstance(last.expr, BinOp)
            and last.expr.op == "sub"
            and last.expr.left == Var(var)
            and isinstance(last.expr.right, NatLit)
            and last.expr.right.value >= 1
        ):
            return None
        clauses.append(Clause(path, var, last.expr.right.value))
    if not clauses:
        return None
    cert = Ranking(tuple(clauses))
    return cert if check_base_certificate(cert, program).accepted else None
