from hypothesis import given, settings
from hypothesis import strategies as st

from pasplearn.grounding import ground
from pasplearn.parsing import parse_program
from pasplearn.stable import answer_sets

from oracles import rule_universe, stable_models_brute, worlds_brute
from randprog import random_ground_program


def _models(text: str, world_facts=()):
    program = parse_program(text)
    gp = ground(program)
    return [
        {str(a) for a in m} for m in answer_sets(gp, list(world_facts)).atom_sets(gp)
    ]


def test_stratified_program_single_model():
    assert _models("a.\nb :- a.\nc :- b, not d.") == [{"a", "b", "c"}]


def test_even_negative_loop_two_models():
    models = _models("a :- not b.\nb :- not a.")
    assert models == [{"a"}, {"b"}] or models == [{"b"}, {"a"}]
    assert len(models) == 2


def test_odd_negative_loop_no_model():
    assert _models("a :- not a.") == []


def test_positive_loop_unfounded():
    # mutual positive support is not a justification
    assert _models("a :- b.\nb :- a.") == [set()]


def test_positive_loop_with_external_support():
    assert _models("a :- b.\nb :- a.\nb :- c.\nc.") == [{"a", "b", "c"}]


def test_constraint_filters_models():
    models = _models("a :- not b.\nb :- not a.\n:- a.")
    assert models == [{"b"}]


def test_constraint_can_wipe_all_models():
    assert _models("a.\n:- a.") == []


def test_world_facts_change_models():
    text = "0.5::f.\na :- f, not b.\nb :- f, not a.\n"
    program = parse_program(text)
    gp = ground(program)
    f = program.prob_facts[0].atom
    assert len(answer_sets(gp, [f])) == 2
    assert answer_sets(gp, []).atom_sets(gp) == [frozenset()]


def test_models_sorted_lexicographically():
    program = parse_program("a :- not b.\nb :- not a.\nc :- a.\nc :- b.")
    gp = ground(program)
    ms = answer_sets(gp, [])
    assert list(ms.masks) == sorted(ms.masks)


def test_exhaustive_flag_matches_fast_path():
    text = "0.5::f.\na :- not b, f.\nb :- not a.\nc :- a, b.\n:- c."
    program = parse_program(text)
    gp = ground(program)
    for facts in ([], [program.prob_facts[0].atom]):
        fast = answer_sets(gp, list(facts))
        slow = answer_sets(gp, list(facts), exhaustive=True)
        assert fast.masks == slow.masks


@settings(max_examples=120)
@given(st.integers(min_value=0, max_value=50_000))
def test_solver_matches_brute_force_oracle(seed):
    program = random_ground_program(seed)
    gp = ground(program)
    rules = list(program.rules)
    prob_atoms = {pf.atom for pf in program.prob_facts}
    universe = rule_universe(rules, prob_atoms)
    for bits, chosen, _p in worlds_brute(program):
        world = [pf.atom for pf, b in zip(program.prob_facts, bits) if b]
        fast = {frozenset(m) for m in answer_sets(gp, world).atom_sets(gp)}
        brute = {
            frozenset(m) for m in stable_models_brute(rules, chosen, universe)
        }
        assert fast == brute, f"world {bits}"
