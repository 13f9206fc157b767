import random
from pathlib import Path

import pytest
from hypothesis import given, settings

from omega_tower import lang, tower
from omega_tower.errors import NotALimitError, ParseError
from omega_tower.lang import Bool, Halt, Nat, PairV, Str
from omega_tower.ordinal import parse_ordinal, print_ordinal
from omega_tower.proof import (
    Clause,
    Diagonal,
    LeftCert,
    LoopFree,
    Ranking,
    Reflection,
    RejectReason,
    RightCert,
    SingletonCert,
    print_certificate,
)
from omega_tower.tower import Singleton, Tower, Union, diag, parse_verifier, print_verifier, verify
from strategies import verifiers

GOLDEN = Path(__file__).parent / "golden"
MINIMAL = lang.parse_program("(fun (x) (block (return (bool true))))")
COUNTDOWN = lang.parse_program(
    "(fun (x) (block (set n (var x)) (while (lt (nat 0) (var n)) "
    "(body (set n (sub (var n) (nat 1))))) (return (bool true))))"
)
COUNTDOWN_CERT = Ranking((Clause((1,), "n", 1),))
CHAIN = ["0", "1", "2", "w", "w + 1", "w*2", "w^2", "w^w"]


def T(text):
    return Tower(parse_ordinal(text))


def test_verify_examples():
    assert verify(T("0"), LoopFree(), MINIMAL).accepted
    assert verify(T("0"), Diagonal("tower 0"), diag(T("0"))).reason is RejectReason.LEVEL_NOT_BELOW
    assert verify(T("1"), Diagonal("tower 0"), diag(T("0"))).accepted
    assert verify(T("w"), Reflection("3", LoopFree()), MINIMAL).accepted
    p0 = lang.print_program(diag(T("0")))
    assert verify(Singleton(p0), SingletonCert(), diag(T("0"))).accepted


@pytest.mark.parametrize(
    "v,cert,program,reason",
    [
        (T("1"), Diagonal("tower 0"), MINIMAL, RejectReason.NOT_DIAGONAL_PROGRAM),
        (T("1"), Diagonal("tower"), MINIMAL, RejectReason.BAD_DESCRIPTOR),
        (T("w"), Diagonal('singleton "x"'), MINIMAL, RejectReason.BAD_DESCRIPTOR),
        (T("w"), Reflection("1 + w", LoopFree()), MINIMAL, RejectReason.BAD_ORDINAL),
        (T("w"), Reflection("w", LoopFree()), MINIMAL, RejectReason.LEVEL_NOT_BELOW),
        (T("w"), SingletonCert(), MINIMAL, RejectReason.WRONG_CERTIFICATE),
        (Singleton(lang.print_program(COUNTDOWN)), SingletonCert(), MINIMAL, RejectReason.PROGRAM_MISMATCH),
        (Singleton(lang.print_program(MINIMAL)), LoopFree(), MINIMAL, RejectReason.WRONG_CERTIFICATE),
        (Union(T("0"), T("1")), LoopFree(), MINIMAL, RejectReason.WRONG_CERTIFICATE),
    ],
)
def test_verify_rejections(v, cert, program, reason):
    assert verify(v, cert, program).reason is reason


def test_diagonal_certificate_needs_a_tower_descriptor():
    p0 = lang.print_program(diag(T("0")))
    singleton = print_verifier(Singleton(p0))
    assert verify(T("w"), Diagonal(singleton), diag(Singleton(p0))).reason is RejectReason.NOT_TOWER_DESCRIPTOR


def test_union_routes_left_and_right():
    v = Union(T("0"), Singleton(lang.print_program(diag(T("0")))))
    assert verify(v, LeftCert(COUNTDOWN_CERT), COUNTDOWN).accepted
    assert verify(v, RightCert(SingletonCert()), diag(T("0"))).accepted
    assert not verify(v, LeftCert(SingletonCert()), diag(T("0"))).accepted


def test_diag_matches_golden_file():
    golden = (GOLDEN / "diag_tower_0.prog").read_text(encoding="utf-8").strip()
    assert lang.print_program(diag(T("0"))) == golden
    assert golden == tower.DIAGONAL_TEMPLATE.replace("%V%", "tower 0")


def test_diag_is_deterministic_and_embeds_descriptor():
    text = lang.print_program(diag(T("w^2 + 1")))
    assert text == lang.print_program(diag(T("w^2 + 1")))
    assert '(str "tower w^2 + 1")' in text
    assert tower.diagonal_descriptor(diag(T("w^2 + 1"))) == "tower w^2 + 1"
    assert tower.diagonal_descriptor(MINIMAL) is None


def test_diag_returns_false_on_non_pairs():
    assert tower.run_with_tower(diag(T("0")), Nat(7), 100) == Halt(Bool(False))
    assert tower.run_with_tower(diag(T("0")), PairV(Nat(1), Str("x")), 100) == Halt(Bool(False))


def test_cross_level_trace():
    i = PairV(Str('(diagonal "tower 0")'), Str(lang.print_program(diag(T("0")))))
    assert tower.run_with_tower(diag(T("1")), i, 10**6) == Halt(Bool(True))
    assert tower.run_with_tower(diag(T("0")), i, 10**6) == Halt(Bool(False))


@pytest.mark.parametrize(
    "cert,program",
    [
        (LoopFree(), MINIMAL),
        (COUNTDOWN_CERT, COUNTDOWN),
        (LoopFree(), lang.parse_program("(fun (x) (block (return (fst (var x)))))")),
        (LoopFree(), lang.parse_program("(fun (x) (block (return (nat 0))))")),
    ],
)
def test_diagonal_differs_from_accepted_programs(cert, program):
    witness = tower.diagonal_witness(T("0"), cert, program, 10**6)
    assert witness.subject_check.accepted
    assert witness.differs
    assert witness.holds


def test_diagonal_witness_reports_unaccepted_pairs():
    witness = tower.diagonal_witness(T("0"), LoopFree(), COUNTDOWN, 10**6)
    assert not witness.subject_check.accepted
    assert not witness.holds
    assert witness.diagonal_result == Halt(Bool(False))


def test_strengthen():
    assert tower.strengthen(T("w")) == T("w + 1")
    assert tower.strengthen(tower.strengthen(T("0"))) == T("2")
    s = Singleton(lang.print_program(MINIMAL))
    assert tower.strengthen(s) == Union(s, Singleton(lang.print_program(diag(s))))


def test_strengthened_singleton_accepts_its_diagonal():
    s = Singleton(lang.print_program(MINIMAL))
    stronger = tower.strengthen(s)
    assert verify(stronger, RightCert(SingletonCert()), diag(s)).accepted
    assert not verify(s, SingletonCert(), diag(s)).accepted


@pytest.mark.parametrize(
    "limit,k,expected",
    [
        ("w", 4, ["0", "1", "2", "3"]),
        ("w*2", 3, ["w", "w + 1", "w + 2"]),
        ("w^w", 3, ["1", "w", "w^2"]),
    ],
)
def test_enumerate_tower(limit, k, expected):
    assert [print_ordinal(a) for a in tower.enumerate_tower(parse_ordinal(limit), k)] == expected


def test_enumerate_tower_errors():
    with pytest.raises(NotALimitError):
        tower.enumerate_tower(parse_ordinal("w + 1"), 2)
    with pytest.raises(ValueError):
        tower.enumerate_tower(parse_ordinal("w"), 0)


def test_frontier_stays_below():
    alpha = parse_ordinal("w^w")
    below = tower.frontier(alpha)
    assert below
    assert all(b < alpha for b in below)
    assert below == sorted(below, reverse=True)
    assert tower.frontier(parse_ordinal("0")) == []
    assert tower.frontier(parse_ordinal("3")) == [parse_ordinal("2"), parse_ordinal("1"), parse_ordinal("0")]


def test_search_examples():
    assert tower.accepts_via_search(T("1"), diag(T("0")), 100) == Diagonal("tower 0")
    assert tower.accepts_via_search(T("0"), diag(T("0")), 10**4) is None
    assert tower.accepts_via_search(T("0"), COUNTDOWN, 100) == COUNTDOWN_CERT
    assert tower.accepts_via_search(T("0"), COUNTDOWN, 0) is None


def test_search_through_unions():
    v = tower.strengthen(Singleton(lang.print_program(MINIMAL)))
    found = tower.accepts_via_search(v, diag(Singleton(lang.print_program(MINIMAL))), 10)
    assert found == RightCert(SingletonCert())


@pytest.mark.parametrize("level", CHAIN)
def test_strict_hierarchy(level):
    alpha = parse_ordinal(level)
    witness = tower.strictness_witness(alpha, 10**4)
    assert witness.accepted_above.accepted
    assert witness.candidate_accepted is None
    assert witness.search_result is None
    assert witness.holds
    top = T("w^w + 1")
    assert verify(top, Diagonal(f"tower {level}"), diag(Tower(alpha))).accepted


def test_reflection_nesting():
    rng = random.Random(11)
    levels = [parse_ordinal(t) for t in CHAIN + ["w^w + 1", "w^(w + 1)"]]
    for _ in range(100):
        b1, b2, a = sorted(rng.sample(levels, 3))
        inner = Diagonal(f"tower {print_ordinal(rng.choice([lvl for lvl in levels if lvl < b1] or [b1]))}")
        target = diag(parse_verifier(inner.vdesc_text))
        if not verify(Tower(b1), inner, target).accepted:
            continue
        cert = Reflection(print_ordinal(b2), Reflection(print_ordinal(b1), inner))
        assert verify(Tower(a), cert, target).accepted


def test_monotone_in_level():
    rng = random.Random(5)
    levels = sorted(parse_ordinal(t) for t in CHAIN)
    certs = [LoopFree(), COUNTDOWN_CERT] + [Diagonal(f"tower {t}") for t in CHAIN]
    certs += [Reflection(t, c) for t in CHAIN for c in certs[:4]]
    programs = [MINIMAL, COUNTDOWN] + [diag(T(t)) for t in CHAIN]
    for _ in range(500):
        a, b = sorted(rng.sample(levels, 2))
        cert, program = rng.choice(certs), rng.choice(programs)
        if verify(Tower(a), cert, program).accepted:
            assert verify(Tower(b), cert, program).accepted


def test_reflection_lifts_accepted_pairs_to_higher_levels():
    rng = random.Random(8)
    levels = sorted(parse_ordinal(t) for t in CHAIN + ["w^w + 1", "w^3 + w", "w^(w + 1)", "w^(w^w)"])
    certs = [LoopFree(), COUNTDOWN_CERT] + [Diagonal(f"tower {t}") for t in CHAIN]
    certs += [Reflection(t, c) for t in CHAIN for c in certs[:4]]
    programs = [MINIMAL, COUNTDOWN] + [diag(T(t)) for t in CHAIN]
    accepted = [
        (a, cert, program)
        for a in levels
        for cert in certs
        for program in programs
        if verify(Tower(a), cert, program).accepted
    ]
    assert len(accepted) > 20
    for _ in range(500):
        a, cert, program = rng.choice(accepted)
        above = [b for b in levels if a < b]
        if not above:
            continue
        b = rng.choice(above)
        assert verify(Tower(b), Reflection(print_ordinal(a), cert), program).accepted


@pytest.mark.parametrize(
    "text",
    [
        "tower 0",
        "tower w^w + w*2 + 1",
        "union (tower 0) (tower w)",
        "union (union (tower 1) (tower 2)) (tower 3)",
        'singleton "(fun (x) (block (return (bool true))))"',
    ],
)
def test_verifier_text_is_canonical(text):
    assert print_verifier(parse_verifier(text)) == text


@pytest.mark.parametrize(
    "text",
    [
        "tower",
        "tower 1 + w",
        "towers 1",
        "union (tower 0)",
        "union (tower 0) tower 1",
        'singleton "(fun (x)  (block (return (bool true))))"',
        'singleton "(fun (x) (block))"',
    ],
)
def test_malformed_verifiers(text):
    with pytest.raises(ParseError):
        parse_verifier(text)


def _mutate(rng, text):
    chars = list(text)
    for _ in range(rng.randrange(1, 4)):
        op = rng.randrange(3)
        pos = rng.randrange(len(chars) + 1)
        if op == 0 and chars:
            del chars[min(pos, len(chars) - 1)]
        elif op == 1:
            chars.insert(pos, rng.choice('()" \\wx0123^*+'))
        elif chars:
            chars[min(pos, len(chars) - 1)] = rng.choice("()\"abc019w")
    return "".join(chars)


def test_verify_is_total_on_fuzzed_triples():
    rng = random.Random(20241018)
    vdescs = ["tower 0", "tower w + 1", "union (tower 0) (tower 1)", print_verifier(Singleton(lang.print_program(MINIMAL)))]
    proofs = [print_certificate(c) for c in (LoopFree(), COUNTDOWN_CERT, Diagonal("tower 0"), Reflection("w", LoopFree()), LeftCert(SingletonCert()))]
    programs = [lang.print_program(p) for p in (MINIMAL, COUNTDOWN, diag(T("0")))]
    for _ in range(10_000):
        v = rng.choice(vdescs)
        p = rng.choice(proofs)
        t = rng.choice(programs)
        which = rng.randrange(4)
        if which == 0:
            v = _mutate(rng, v)
        elif which == 1:
            p = _mutate(rng, p)
        elif which == 2:
            t = _mutate(rng, t)
        assert tower.verify_oracle(v, p, t) in (True, False)


@settings(max_examples=1000)
@given(v=verifiers)
def test_generated_verifier_text_round_trips(v):
    text = print_verifier(v)
    assert parse_verifier(text) == v
    assert print_verifier(parse_verifier(text)) == text
