"""Belief bases over Terminating/Trusted/Implies statements.

A base is closed under three rules:

* modus ponens: from ``s`` and ``(implies s s')`` believe ``s'``;
* a trusted verifier's diagonal program terminates:
  ``(trusted V)`` gives ``(implies (trusted V) (terminating P_V))``;
* a terminating program makes its singleton verifier trusted:
  ``(terminating P)`` gives ``(implies (terminating P) (trusted "singleton P"))``.

The closure is infinite, so ``close`` materialises a fixed number of rounds.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import FrozenSet, Iterator, List, Set, Tuple, Union

from . import lang, sexp, tower
from .errors import NotTrustedError, ParseError
from .sexp import SList

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TerminatingS:
    program_text: str


@dataclass(frozen=True)
class TrustedS:
    vdesc_text: str


@dataclass(frozen=True)
class ImpliesS:
    antecedent: "Statement"
    consequent: "Statement"


Statement = Union[TerminatingS, TrustedS, ImpliesS]


def _statement(node: sexp.Node) -> Statement:
    if not isinstance(node, SList) or node.head() is None:
        raise ParseError("expected statement", node.line, node.column)
    head = node.head()
    if head == "terminating":
        sexp.expect_list(node, head, 1)
        return TerminatingS(sexp.expect_string(node.items[1], "program text"))
    if head == "trusted":
        sexp.expect_list(node, head, 1)
        return TrustedS(sexp.expect_string(node.items[1], "verifier descriptor"))
    if head == "implies":
        sexp.expect_list(node, head, 2)
        return ImpliesS(_statement(node.items[1]), _statement(node.items[2]))
    raise ParseError(f"unknown statement '{head}'", node.line, node.column)


def parse_statement(text: str) -> Statement:
    return _statement(sexp.read(text))


def print_statement(stmt: Statement) -> str:
    if isinstance(stmt, TerminatingS):
        return f"(terminating {sexp.quote(stmt.program_text)})"
    if isinstance(stmt, TrustedS):
        return f"(trusted {sexp.quote(stmt.vdesc_text)})"
    if isinstance(stmt, ImpliesS):
        return f"(implies {print_statement(stmt.antecedent)} {print_statement(stmt.consequent)})"
    raise TypeError(f"not a statement: {stmt!r}")


@dataclass(frozen=True)
class BeliefBase:
    statements: FrozenSet[Statement] = frozenset()
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __contains__(self, stmt: Statement) -> bool:
        return stmt in self.statements

    def __iter__(self) -> Iterator[Statement]:
        return iter(sorted(self.statements, key=print_statement))

    def __len__(self) -> int:
        return len(self.statements)

    def with_statement(self, stmt: Statement) -> "BeliefBase":
        return BeliefBase(self.statements | {stmt}, self.warnings)


def base_of(*stmts: Statement) -> BeliefBase:
    return BeliefBase(frozenset(stmts))


def load_base(path: str | Path) -> BeliefBase:
    """Read newline-separated statements; blank lines and ``#`` comments are ignored."""
    stmts = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            stmts.append(parse_statement(text))
        except ParseError as exc:
            raise ParseError(f"{path}: {exc.reason}", number, exc.column) from None
    return BeliefBase(frozenset(stmts))


def dump_base(base: BeliefBase) -> str:
    return "".join(print_statement(s) + "\n" for s in base)


# ---------------------------------------------------------------- closure


def _singleton_trust(program_text: str) -> TrustedS:
    return TrustedS(tower.print_verifier(tower.Singleton(program_text)))


def _diagonal_termination(vdesc_text: str) -> TerminatingS:
    return TerminatingS(lang.print_program(tower.diag(tower.parse_verifier(vdesc_text))))


def _consequences(stmt: Statement, snapshot: Set[Statement], warnings: List[str]) -> Set[Statement]:
    if isinstance(stmt, ImpliesS):
        return {stmt.consequent} if stmt.antecedent in snapshot else set()
    try:
        if isinstance(stmt, TrustedS):
            derived: Statement = _diagonal_termination(stmt.vdesc_text)
        else:
            program = lang.parse_program(stmt.program_text)
            if lang.print_program(program) != stmt.program_text:
                raise ParseError("program text is not canonical")
            derived = _singleton_trust(stmt.program_text)
    except ParseError as exc:
        message = f"skipped {print_statement(stmt)[:80]}: {exc}"
        if message not in warnings:
            log.warning(message)
            warnings.append(message)
        return set()
    return {ImpliesS(stmt, derived), derived}


def close(base: BeliefBase, depth: int) -> BeliefBase:
    """Apply every rule to every statement ``depth`` times, stopping early at a fixpoint."""
    if depth < 0:
        raise ValueError("depth must be a natural number")
    current: Set[Statement] = set(base.statements)
    warnings: List[str] = list(base.warnings)
    for round_ in range(depth):
        snapshot = frozenset(current)
        fresh: Set[Statement] = set()
        for stmt in sorted(snapshot, key=print_statement):
            fresh |= _consequences(stmt, snapshot, warnings)
        if fresh <= snapshot:
            log.debug("closure reached a fixpoint after %d round(s)", round_)
            break
        current |= fresh
    return BeliefBase(frozenset(current), tuple(warnings))


def is_derivable(base: BeliefBase, stmt: Statement, depth: int) -> bool:
    return stmt in close(base, depth)


# ---------------------------------------------------------------- derivations


class Rule(enum.Enum):
    PREMISE = "premise"
    MP = "mp"
    AXIOM2 = "axiom2"
    AXIOM3 = "axiom3"


@dataclass(frozen=True)
class DerivationStep:
    statement: Statement
    rule: Rule
    premises: Tuple[int, ...] = ()


@dataclass(frozen=True)
class DerivationTrace:
    steps: Tuple[DerivationStep, ...]

    @property
    def conclusion(self) -> Statement:
        return self.steps[-1].statement

    def is_well_formed(self) -> bool:
        """Premises precede each step and every rule is applied to the right shapes."""
        for i, step in enumerate(self.steps):
            if any(p >= i for p in step.premises):
                return False
            cited = [self.steps[p].statement for p in step.premises]
            if step.rule is Rule.MP:
                if len(cited) != 2 or cited[1] != ImpliesS(cited[0], step.statement):
                    return False
            elif step.rule in (Rule.AXIOM2, Rule.AXIOM3):
                if len(cited) != 1 or not isinstance(step.statement, ImpliesS):
                    return False
                if step.statement.antecedent != cited[0]:
                    return False
        return True

    def render(self) -> str:
        return "".join(
            f"{i}. [{step.rule.value}{''.join(' ' + str(p) for p in step.premises)}] {print_statement(step.statement)}\n"
            for i, step in enumerate(self.steps)
        )


def derive_stronger_trusted(base: BeliefBase, v: tower.VerifierDesc) -> Tuple[tower.VerifierDesc, DerivationTrace]:
    """A trusted verifier strictly stronger than ``v``, with the derivation that justifies it."""
    trusted = TrustedS(tower.print_verifier(v))
    if not is_derivable(base, trusted, 3):
        raise NotTrustedError(f"{trusted.vdesc_text[:80]} is not trusted by the base")
    program_text = lang.print_program(tower.diag(v))
    terminating = TerminatingS(program_text)
    singleton = _singleton_trust(program_text)
    trace = DerivationTrace(
        (
            DerivationStep(trusted, Rule.PREMISE),
            DerivationStep(ImpliesS(trusted, terminating), Rule.AXIOM2, (0,)),
            DerivationStep(terminating, Rule.MP, (0, 1)),
            DerivationStep(ImpliesS(terminating, singleton), Rule.AXIOM3, (2,)),
            DerivationStep(singleton, Rule.MP, (2, 3)),
        )
    )
    return tower.Union(v, tower.Singleton(program_text)), trace


def iterate_stronger_trusted(
    base: BeliefBase, v: tower.VerifierDesc, rounds: int
) -> List[Tuple[tower.VerifierDesc, DerivationTrace]]:
    """Repeat ``derive_stronger_trusted``, adopting each new verifier as trusted."""
    results = []
    for _ in range(rounds):
        w, trace = derive_stronger_trusted(base, v)
        results.append((w, trace))
        base = base.with_statement(TrustedS(tower.print_verifier(w)))
        v = w
    return results
