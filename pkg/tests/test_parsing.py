import pytest
from hypothesis import given
from hypothesis import strategies as st

from pasplearn.errors import (
    ContradictoryInterpretation,
    DuplicateProbFact,
    HeadIsProbFact,
    NonGroundInterpretation,
    PaspSyntaxError,
    ProbOutOfRange,
)
from pasplearn.model import Atom, Literal, format_prob
from pasplearn.parsing import (
    interpretations_to_text,
    parse_interpretations,
    parse_program,
    parse_query,
    program_to_text,
)

from randprog import random_ground_program, random_var_program


def test_parse_basic_program():
    p = parse_program("0.4::a.\nlearnable(0.7)::b.\nq :- a, not b.\n:- q, b.")
    assert p.n_prob_facts == 2
    assert p.prob_facts[0].prob == 0.4 and not p.prob_facts[0].learnable
    assert p.prob_facts[1].learnable and p.prob_facts[1].prob == 0.7
    assert len(p.rules) == 2
    assert p.rules[1].head is None


def test_learnable_without_initial_prob_defaults_to_half():
    p = parse_program("learnable::coin.")
    assert p.prob_facts[0].prob == 0.5
    assert p.prob_facts[0].learnable


def test_comments_and_whitespace_ignored():
    p = parse_program("% intro\n0.4::a. % trailing\n\n  q :- a.\n")
    assert p.n_prob_facts == 1 and len(p.rules) == 1


def test_arity_overloading_allowed():
    p = parse_program("0.2::f(1).\nq :- f(1), not f(1,2).\n0.3::f(1,2).")
    assert {str(pf.atom) for pf in p.prob_facts} == {"f(1)", "f(1,2)"}


def test_duplicate_prob_fact_rejected():
    with pytest.raises(DuplicateProbFact):
        parse_program("0.4::a.\n0.5::a.")


def test_prob_out_of_range_rejected():
    with pytest.raises(ProbOutOfRange):
        parse_program("1.5::a.")
    with pytest.raises(ProbOutOfRange):
        parse_program("learnable(1.01)::a.")


def test_boundary_probabilities_accepted():
    p = parse_program("0.0::a.\n1.0::b.")
    assert [pf.prob for pf in p.prob_facts] == [0.0, 1.0]


def test_prob_fact_as_head_rejected():
    with pytest.raises(HeadIsProbFact):
        parse_program("0.4::a.\na :- b.")


def test_nonground_prob_fact_rejected():
    with pytest.raises(PaspSyntaxError):
        parse_program("0.4::f(X).")


def test_syntax_error_carries_position():
    with pytest.raises(PaspSyntaxError) as exc:
        parse_program("0.4::a.\nq :- ,")
    assert exc.value.span is not None
    assert exc.value.span.line == 2


def test_uppercase_functor_rejected():
    with pytest.raises(PaspSyntaxError):
        parse_program("q :- Foo.")


def test_parse_interpretations_lines():
    interps = parse_interpretations("a, not b.\n% comment line\nc.\n")
    assert len(interps) == 2
    assert str(interps[0]) == "a,not b."
    assert len(interps[1]) == 1


def test_interpretation_must_be_ground():
    with pytest.raises(NonGroundInterpretation):
        parse_interpretations("f(X).")


def test_interpretation_contradiction_rejected():
    with pytest.raises(ContradictoryInterpretation):
        parse_interpretations("a, not a.")


def test_parse_query_handles_optional_dot_and_negation():
    lits = parse_query("path(1,4), not edge(2,4).")
    assert lits == parse_query("path(1,4), not edge(2,4)")
    assert [l.positive for l in lits] == [True, False]


def test_parse_query_requires_ground_literals():
    with pytest.raises(PaspSyntaxError):
        parse_query("path(X,4)")


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_format_prob_round_trips(p):
    assert float(format_prob(p)) == p
    assert "e" not in format_prob(p)  # stays inside the grammar


@given(st.integers(min_value=0, max_value=10_000))
def test_ground_program_text_round_trip(seed):
    program = random_ground_program(seed)
    assert parse_program(program_to_text(program)) == program


@given(st.integers(min_value=0, max_value=10_000))
def test_var_program_text_round_trip(seed):
    program = random_var_program(seed)
    assert parse_program(program_to_text(program)) == program


def test_interpretations_round_trip():
    text = "a, not b.\nc.\n"
    interps = parse_interpretations(text)
    assert parse_interpretations(interpretations_to_text(interps)) == interps


def test_anonymous_variables_are_distinct():
    p = parse_program("q(X) :- e(X,_), f(_).")
    (rule,) = p.rules
    anon = [a for a in rule.variables() if a.startswith("_")]
    assert len(set(anon)) == 2


def test_negated_literal_rendering():
    lit = Literal(Atom("f", (1, "X")), positive=False)
    assert str(lit) == "not f(1,X)"
