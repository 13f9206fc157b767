import random

import pytest
from hypothesis import given, settings

from omega_tower import belief, lang, tower
from omega_tower.belief import ImpliesS, Rule, TerminatingS, TrustedS, base_of, close, is_derivable
from omega_tower.errors import NotTrustedError, ParseError
from omega_tower.ordinal import parse_ordinal
from omega_tower.proof import RightCert, SingletonCert
from strategies import statements

MINIMAL_TEXT = "(fun (x) (block (return (bool true))))"


def T(text):
    return tower.Tower(parse_ordinal(text))


def p_text(v):
    return lang.print_program(tower.diag(v))


def test_axiom2_gives_termination_of_the_diagonal():
    closed = close(base_of(TrustedS("tower 1")), 2)
    assert TerminatingS(p_text(T("1"))) in closed
    assert ImpliesS(TrustedS("tower 1"), TerminatingS(p_text(T("1")))) in closed


def test_axiom3_trusts_the_singleton():
    closed = close(base_of(TrustedS("tower 1")), 3)
    assert TrustedS(tower.print_verifier(tower.Singleton(p_text(T("1"))))) in closed


def test_empty_base_stays_empty():
    assert len(close(base_of(), 10)) == 0


def test_modus_ponens():
    a = TerminatingS(MINIMAL_TEXT)
    b = TrustedS("tower 5")
    assert b in close(base_of(a, ImpliesS(a, b)), 1)
    assert b not in close(base_of(a), 1)


def test_negative_depth_is_rejected():
    with pytest.raises(ValueError):
        close(base_of(), -1)


def test_closure_is_inflationary_and_monotone():
    base = base_of(TrustedS("tower 0"), TerminatingS(MINIMAL_TEXT))
    previous = base.statements
    for depth in range(4):
        current = close(base, depth).statements
        assert previous <= current
        previous = current


def test_fixpoint_is_stable():
    a, b = TerminatingS(MINIMAL_TEXT), TrustedS("tower 2")
    base = base_of(ImpliesS(b, a))
    assert close(base, 1) == close(base, 5) == base


def test_malformed_statements_are_skipped_with_a_warning():
    base = base_of(TrustedS("tower 1 + w"), TerminatingS("(fun (x)  (block (return (bool true))))"))
    closed = close(base, 3)
    assert closed.statements == base.statements
    assert len(closed.warnings) == 2


def test_is_derivable():
    assert is_derivable(base_of(TrustedS("tower 1")), TerminatingS(p_text(T("1"))), 2)
    assert not is_derivable(base_of(), TerminatingS(MINIMAL_TEXT), 10)


def test_derivability_is_monotone_in_depth():
    rng = random.Random(3)
    base = base_of(TrustedS("tower w"), TerminatingS(MINIMAL_TEXT))
    candidates = list(close(base, 3))
    for _ in range(20):
        stmt = rng.choice(candidates)
        depth = rng.randrange(3)
        if is_derivable(base, stmt, depth):
            assert is_derivable(base, stmt, depth + 1)


def test_derive_stronger_trusted():
    v = T("0")
    w, trace = belief.derive_stronger_trusted(base_of(TrustedS("tower 0")), v)
    assert w == tower.Union(v, tower.Singleton(p_text(v)))
    assert len(trace.steps) == 5
    assert [s.rule for s in trace.steps] == [Rule.PREMISE, Rule.AXIOM2, Rule.MP, Rule.AXIOM3, Rule.MP]
    assert trace.is_well_formed()
    assert trace.conclusion == TrustedS(tower.print_verifier(tower.Singleton(p_text(v))))
    assert "[axiom2 0]" in trace.render()


def test_derived_verifier_is_strictly_stronger():
    v = T("0")
    w, _ = belief.derive_stronger_trusted(base_of(TrustedS("tower 0")), v)
    program = tower.diag(v)
    assert tower.accepts_via_search(v, program, 10**4) is None
    assert tower.verify(w, RightCert(SingletonCert()), program).accepted


def test_untrusted_verifier_cannot_be_strengthened():
    with pytest.raises(NotTrustedError):
        belief.derive_stronger_trusted(base_of(), T("0"))


def test_broken_trace_is_not_well_formed():
    _, trace = belief.derive_stronger_trusted(base_of(TrustedS("tower 0")), T("0"))
    steps = list(trace.steps)
    steps[2] = belief.DerivationStep(steps[2].statement, Rule.MP, (1, 0))
    assert not belief.DerivationTrace(tuple(steps)).is_well_formed()


def test_no_maximal_trusted_verifier():
    rounds = belief.iterate_stronger_trusted(base_of(TrustedS("tower 0")), T("0"), 5)
    assert len(rounds) == 5
    previous = T("0")
    seen = {tower.print_verifier(previous)}
    for w, trace in rounds:
        assert trace.is_well_formed()
        assert tower.verify(w, RightCert(SingletonCert()), tower.diag(previous)).accepted
        text = tower.print_verifier(w)
        assert text not in seen
        seen.add(text)
        previous = w


def test_statement_text_form():
    text = f'(implies (trusted "tower 0") (terminating "{MINIMAL_TEXT}"))'
    stmt = belief.parse_statement(text)
    assert stmt == ImpliesS(TrustedS("tower 0"), TerminatingS(MINIMAL_TEXT))
    assert belief.print_statement(stmt) == text
    with pytest.raises(ParseError):
        belief.parse_statement("(believes \"x\")")


def test_base_files(tmp_path):
    path = tmp_path / "base.txt"
    path.write_text('# premises\n\n(trusted "tower 1")\n(terminating "' + MINIMAL_TEXT + '")\n', encoding="utf-8")
    base = belief.load_base(path)
    assert len(base) == 2
    assert belief.dump_base(base).splitlines() == [
        f'(terminating "{MINIMAL_TEXT}")',
        '(trusted "tower 1")',
    ]
    path.write_text('(trusted "tower 1")\n(trusted tower)\n', encoding="utf-8")
    with pytest.raises(ParseError) as info:
        belief.load_base(path)
    assert info.value.line == 2


@settings(max_examples=1000)
@given(stmt=statements)
def test_generated_statements_round_trip(stmt):
    text = belief.print_statement(stmt)
    assert belief.parse_statement(text) == stmt
    assert belief.print_statement(belief.parse_statement(text)) == text
