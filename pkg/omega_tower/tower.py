"""Verifier descriptors, the diagonal program and the ordinal-indexed tower.

``tower a`` accepts base certificates plus ``(diagonal "tower b")`` for the
diagonal program of any lower level ``b < a`` and ``(reflection "b" c)`` for
anything level ``b < a`` accepts. Every level is total and strictly stronger
than the levels below it.
"""

from __future__ import annotations

import itertools
import logging
import typing
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from . import lang, sexp
from .errors import ParseError
from .lang import Program, RunResult, Value
from .ordinal import (
    Limit,
    Ordinal,
    Successor,
    classify,
    fundamental_sequence,
    parse_ordinal,
    print_ordinal,
    successor,
)
from .proof import (
    ACCEPT,
    Certificate,
    CheckResult,
    Clause,
    Diagonal,
    LeftCert,
    LoopFree,
    Ranking,
    Reflection,
    RejectReason,
    RightCert,
    SingletonCert,
    check_base_certificate,
    infer_certificate,
    parse_certificate,
    print_certificate,
    reject,
)

log = logging.getLogger(__name__)

MAX_UNION_DEPTH = 64

DIAGONAL_TEMPLATE = (
    '(fun (x) (block (if (ispair (var x)) (body (set pi (fst (var x))) (set t (snd (var x))) '
    '(if (and (and (eq (ispair (var pi)) (bool false)) (eq (ispair (var t)) (bool false))) '
    '(verify (str "%V%") (var pi) (var t))) (body (set r (not (tobool (apply (var t) (var x)))))) '
    '(body (set r (bool false))))) (body (set r (bool false)))) (return (var r))))'
)


# ---------------------------------------------------------------- descriptors


@dataclass(frozen=True)
class Tower:
    level: Ordinal


@dataclass(frozen=True)
class Singleton:
    program_text: str


@dataclass(frozen=True)
class Union:
    left: "VerifierDesc"
    right: "VerifierDesc"


VerifierDesc = typing.Union[Tower, Singleton, Union]


def _groups(text: str, offset: int) -> List[Tuple[str, int]]:
    """Split ``(a) (b)`` into its parenthesised groups, honouring strings."""
    groups = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch != "(":
            raise ParseError("expected '(' in union", 1, offset + i + 1)
        depth, start, in_string = 0, i, False
        while i < len(text):
            ch = text[i]
            if in_string:
                if ch == "\\":
                    i += 1
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    break
            i += 1
        if depth:
            raise ParseError("unbalanced parentheses in union", 1, offset + start + 1)
        groups.append((text[start + 1:i], offset + start + 1))
        i += 1
    return groups


def _parse_verifier(text: str, offset: int, depth: int) -> VerifierDesc:
    if depth > MAX_UNION_DEPTH:
        raise ParseError("union nesting too deep", 1, offset + 1)
    stripped = text.lstrip()
    offset += len(text) - len(stripped)
    stripped = stripped.rstrip()
    keyword, _, rest = stripped.partition(" ")
    rest_offset = offset + len(keyword) + 1
    if keyword == "tower":
        return Tower(parse_ordinal(rest))
    if keyword == "singleton":
        node = sexp.read(rest)
        program_text = sexp.expect_string(node, "program text")
        program = lang.parse_program(program_text)
        if lang.print_program(program) != program_text:
            raise ParseError("singleton program text is not canonical", 1, rest_offset + 1)
        return Singleton(program_text)
    if keyword == "union":
        groups = _groups(rest, rest_offset)
        if len(groups) != 2:
            raise ParseError("union takes exactly two descriptors", 1, rest_offset + 1)
        (left, lo), (right, ro) = groups
        return Union(_parse_verifier(left, lo, depth + 1), _parse_verifier(right, ro, depth + 1))
    raise ParseError(f"unknown verifier '{keyword}'", 1, offset + 1)


def parse_verifier(text: str) -> VerifierDesc:
    """Parse ``tower ORD``, ``singleton "PROGRAM"`` or ``union (V) (V)``."""
    return _parse_verifier(text, 0, 0)


def print_verifier(v: VerifierDesc) -> str:
    if isinstance(v, Tower):
        return f"tower {print_ordinal(v.level)}"
    if isinstance(v, Singleton):
        return f"singleton {sexp.quote(v.program_text)}"
    if isinstance(v, Union):
        return f"union ({print_verifier(v.left)}) ({print_verifier(v.right)})"
    raise TypeError(f"not a verifier descriptor: {v!r}")


# ---------------------------------------------------------------- diagonal program


@lru_cache(maxsize=1024)
def diag(v: VerifierDesc) -> Program:
    """The program that runs ``v`` on its (proof, program) input and negates the program."""
    return lang.parse_program(DIAGONAL_TEMPLATE.replace("%V%", sexp.escape(print_verifier(v))))


def diagonal_descriptor(program: Program) -> Optional[str]:
    """Descriptor text embedded in ``program`` if it is exactly a diagonal program."""
    for expr in lang.iter_program_exprs(program):
        if isinstance(expr, lang.Verify) and isinstance(expr.vdesc, lang.StrLit):
            try:
                v = parse_verifier(expr.vdesc.value)
            except ParseError:
                return None
            return expr.vdesc.value if diag(v) == program else None
    return None


# ---------------------------------------------------------------- verification


def _verify(v: VerifierDesc, cert: Certificate, program: Program) -> CheckResult:
    if isinstance(v, Tower):
        if isinstance(cert, (LoopFree, Ranking)):
            return check_base_certificate(cert, program)
        if isinstance(cert, Diagonal):
            try:
                target = parse_verifier(cert.vdesc_text)
            except ParseError:
                return reject(RejectReason.BAD_DESCRIPTOR)
            if not isinstance(target, Tower):
                return reject(RejectReason.NOT_TOWER_DESCRIPTOR)
            if not target.level < v.level:
                return reject(RejectReason.LEVEL_NOT_BELOW)
            if diag(target) != program:
                return reject(RejectReason.NOT_DIAGONAL_PROGRAM)
            return ACCEPT
        if isinstance(cert, Reflection):
            try:
                beta = parse_ordinal(cert.ord_text)
            except ParseError:
                return reject(RejectReason.BAD_ORDINAL)
            if not beta < v.level:
                return reject(RejectReason.LEVEL_NOT_BELOW)
            return _verify(Tower(beta), cert.inner, program)
        return reject(RejectReason.WRONG_CERTIFICATE)
    if isinstance(v, Singleton):
        if not isinstance(cert, SingletonCert):
            return reject(RejectReason.WRONG_CERTIFICATE)
        if lang.print_program(program) != v.program_text:
            return reject(RejectReason.PROGRAM_MISMATCH)
        return ACCEPT
    if isinstance(cert, LeftCert):
        return _verify(v.left, cert.inner, program)
    if isinstance(cert, RightCert):
        return _verify(v.right, cert.inner, program)
    return reject(RejectReason.WRONG_CERTIFICATE)


def verify(v: VerifierDesc, cert: Certificate, program: Program) -> CheckResult:
    """Total check of ``cert`` as a termination proof of ``program`` for verifier ``v``."""
    try:
        result = _verify(v, cert, program)
    except RecursionError:
        result = reject(RejectReason.TOO_DEEP)
    log.debug("verify %s -> %s", print_verifier(v)[:60], result)
    return result


@lru_cache(maxsize=4096)
def verify_oracle(vdesc_text: str, proof_text: str, program_text: str) -> bool:
    """Text-level verifier used by ``verify`` nodes in the object language."""
    try:
        v = parse_verifier(vdesc_text)
        cert = parse_certificate(proof_text)
        program = lang.parse_program_cached(program_text)
    except ParseError:
        return False
    return verify(v, cert, program).accepted


def run_with_tower(program: Program, value: Value, fuel: int) -> RunResult:
    return lang.run(program, value, fuel, verify_oracle)


# ---------------------------------------------------------------- progression


def strengthen(v: VerifierDesc) -> VerifierDesc:
    if isinstance(v, Tower):
        return Tower(successor(v.level))
    return Union(v, Singleton(lang.print_program(diag(v))))


def enumerate_tower(limit: Ordinal, k: int) -> List[Ordinal]:
    if k < 1:
        raise ValueError("k must be at least 1")
    return [fundamental_sequence(limit, n) for n in range(k)]


def frontier(alpha: Ordinal, width: int = 4, cap: int = 32) -> List[Ordinal]:
    """A finite set of ordinals below ``alpha``, largest first.

    Successors contribute their predecessor, limits their first ``width``
    fundamental-sequence points; the walk continues from every new point.
    """
    found: List[Ordinal] = []
    queue = deque([alpha])
    while queue and len(found) < cap:
        current = queue.popleft()
        shape = classify(current)
        if isinstance(shape, Successor):
            below = [shape.predecessor]
        elif isinstance(shape, Limit):
            below = [fundamental_sequence(current, n) for n in reversed(range(width))]
        else:
            below = []
        for b in below:
            if b not in found:
                found.append(b)
                queue.append(b)
    return sorted(found, reverse=True)[:cap]


# ---------------------------------------------------------------- search


def _base_candidates(program: Program) -> Iterator[Certificate]:
    yield LoopFree()
    inferred = infer_certificate(program)
    if isinstance(inferred, Ranking):
        yield inferred


def _tower_candidates(alpha: Ordinal, program: Program, width: int) -> Iterator[Certificate]:
    yield from _base_candidates(program)
    embedded = diagonal_descriptor(program)
    if embedded is not None:
        yield Diagonal(embedded)
    below = frontier(alpha, width)
    for beta in below:
        yield Diagonal(print_verifier(Tower(beta)))
    for beta in below:
        for inner in _base_candidates(program):
            yield Reflection(print_ordinal(beta), inner)
        if embedded is not None:
            yield Reflection(print_ordinal(beta), Diagonal(embedded))


def candidate_certificates(v: VerifierDesc, program: Program, width: int = 4) -> Iterator[Certificate]:
    """Certificates to try for ``program``, smallest first."""
    if isinstance(v, Tower):
        yield from _tower_candidates(v.level, program, width)
    elif isinstance(v, Singleton):
        yield SingletonCert()
    else:
        left = (LeftCert(c) for c in candidate_certificates(v.left, program, width))
        right = (RightCert(c) for c in candidate_certificates(v.right, program, width))
        for pair in itertools.zip_longest(left, right):
            yield from (c for c in pair if c is not None)


def accepts_via_search(v: VerifierDesc, program: Program, budget: int, width: int = 4) -> Optional[Certificate]:
    """Bounded stand-in for the nondeterministic verifier: try ``budget`` candidates."""
    for tried, cert in enumerate(itertools.islice(candidate_certificates(v, program, width), budget), 1):
        if verify(v, cert, program).accepted:
            log.debug("search found %s after %d candidate(s)", print_certificate(cert), tried)
            return cert
    return None


def hand_built_candidates(alpha: Ordinal, program: Program, width: int = 4) -> List[Certificate]:
    """Fixed candidate set used to show that ``tower alpha`` cannot certify ``program``."""
    names = sorted({s.name for s in lang.iter_stmts(program.body) if isinstance(s, lang.Set)} | {lang.PARAM})
    paths = [(0,), (0, 0, 0), (0, 0, 2), (0, 1, 0)]
    rankings: List[Certificate] = [
        Ranking((Clause(path, name, dec),)) for path in paths for name in names for dec in (1, 2)
    ]
    below = frontier(alpha, width)
    diagonals: List[Certificate] = [Diagonal(print_verifier(Tower(beta))) for beta in below]
    reflections: List[Certificate] = [
        Reflection(print_ordinal(beta), inner)
        for beta in below
        for inner in [LoopFree(), *rankings[:2], *diagonals]
    ]
    return [LoopFree(), *rankings, *diagonals, *reflections]


# ---------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class DiagonalWitness:
    subject_check: CheckResult
    input: Value
    diagonal_result: RunResult
    subject_result: RunResult
    expected: Optional[bool]

    @property
    def differs(self) -> bool:
        return (
            self.diagonal_result.halted
            and self.subject_result.halted
            and self.diagonal_result != self.subject_result
        )

    @property
    def holds(self) -> bool:
        return (
            self.subject_check.accepted
            and self.differs
            and self.diagonal_result == lang.Halt(lang.Bool(self.expected))
        )


def diagonal_witness(v: VerifierDesc, cert: Certificate, program: Program, fuel: int) -> DiagonalWitness:
    """Run ``diag(v)`` and ``program`` on the input ``(proof text, program text)``."""
    pair = lang.PairV(lang.Str(print_certificate(cert)), lang.Str(lang.print_program(program)))
    subject = run_with_tower(program, pair, fuel)
    diagonal = run_with_tower(diag(v), pair, fuel)
    if isinstance(subject, lang.Halt):
        expected: Optional[bool] = not lang.truthiness(subject.value)
    elif isinstance(subject, lang.RuntimeFault):
        expected = True
    else:
        expected = None
    return DiagonalWitness(verify(v, cert, program), pair, diagonal, subject, expected)


@dataclass(frozen=True)
class StrictnessWitness:
    level: Ordinal
    accepted_above: CheckResult
    candidates_tried: int
    candidate_accepted: Optional[Certificate]
    search_result: Optional[Certificate]

    @property
    def holds(self) -> bool:
        return self.accepted_above.accepted and self.candidate_accepted is None and self.search_result is None


def strictness_witness(alpha: Ordinal, budget: int, width: int = 4) -> StrictnessWitness:
    """``tower alpha+1`` certifies ``diag(tower alpha)``; ``tower alpha`` does not."""
    program = diag(Tower(alpha))
    above = verify(Tower(successor(alpha)), Diagonal(print_verifier(Tower(alpha))), program)
    candidates = hand_built_candidates(alpha, program, width)
    leaked = next((c for c in candidates if verify(Tower(alpha), c, program).accepted), None)
    found = accepts_via_search(Tower(alpha), program, budget, width)
    return StrictnessWitness(alpha, above, len(candidates), leaked, found)
