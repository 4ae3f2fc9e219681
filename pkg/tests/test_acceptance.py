"""End-to-end acceptance checks.

Each test covers one numbered criterion; `pytest -v` shows one PASS/FAIL
line per criterion.  Tolerances and time budgets are asserted inline.
"""

import json
import math
import time

import pytest

from pasplearn.cli import main as cli_main
from pasplearn.credal import check_consistency, credal_conditional, credal_query
from pasplearn.datasets import DatasetSpec, generate
from pasplearn.errors import InconsistentWorld, UndefinedConditional
from pasplearn.grounding import ground
from pasplearn.learning import (
    LearnConfig,
    em_expectation,
    em_maximization,
    learn_em,
    learn_opt,
    ll_objective,
)
from pasplearn.model import (
    Query,
    enumerate_worlds,
    interpretation_query,
    query_from_literals,
    world_probability,
)
from pasplearn.parsing import parse_interpretations, parse_program, parse_query
from pasplearn.rng import SplitMix64
from pasplearn.stable import answer_sets
from pasplearn.sympoly import SymPoly, extract_poly, poly_eval, poly_grad

from conftest import EXAMPLE_GRAPH
from oracles import rule_universe, stable_models_brute, worlds_brute
from randprog import random_ground_program, random_query_literals

LEARNABLE_GRAPH = (
    EXAMPLE_GRAPH.replace("0.2::", "learnable(0.2)::")
    .replace("0.3::", "learnable(0.3)::")
    .replace("0.9::", "learnable(0.9)::")
)
EXAMPLE_DATA = "path(1,3), not path(1,4).\npath(1,4).\n"


def q(text):
    return query_from_literals(parse_query(text))


def test_criterion_1_worked_graph_bounds_exact():
    t0 = time.perf_counter()
    program = parse_program(EXAMPLE_GRAPH)
    b = credal_query(program, q("path(1,4)"))
    assert b.lower == pytest.approx(0.0, abs=1e-9)
    assert b.upper == pytest.approx(0.06, abs=1e-9)
    c = credal_conditional(program, q("path(1,4)"), q("edge(2,4)"))
    assert c.lower == pytest.approx(0.0, abs=1e-9)
    assert c.upper == pytest.approx(0.2, abs=1e-9)
    probs = [world_probability(program, w) for w in enumerate_worlds(program)]
    expected = [0.056, 0.504, 0.024, 0.216, 0.014, 0.126, 0.006, 0.054]
    assert probs == pytest.approx(expected, abs=1e-12)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_2_symbolic_upper_is_single_monomial():
    t0 = time.perf_counter()
    program = parse_program(LEARNABLE_GRAPH)
    upper = extract_poly(program, q("path(1,4)"), "upper")
    assert upper.coeffs == {frozenset({0, 1}): 1.0}
    lower = extract_poly(program, q("path(1,4)"), "lower")
    assert lower.coeffs == {}
    assert time.perf_counter() - t0 < 1.0


def test_criterion_3_gradient_learning_reaches_zero_ll():
    t0 = time.perf_counter()
    program = parse_program(LEARNABLE_GRAPH)
    interps = parse_interpretations(EXAMPLE_DATA)
    cfg = LearnConfig(target="upper", method="opt", opt_backend="gradient")
    result = learn_opt(program, interps, cfg)
    assert result.final_ll >= -1e-4
    assert all(p >= 1 - 1e-3 for p in result.params)
    assert time.perf_counter() - t0 < 5.0


def test_criterion_4_oracle_equivalence_suite():
    t0 = time.perf_counter()
    checked = 0
    seed = 0
    while checked < 200:
        seed += 1
        program = random_ground_program(seed)
        gp = ground(program)
        rules = list(program.rules)
        universe = rule_universe(rules, {pf.atom for pf in program.prob_facts})
        consistent = True
        for bits, chosen, _p in worlds_brute(program):
            world = [pf.atom for pf, b in zip(program.prob_facts, bits) if b]
            fast = {frozenset(m) for m in answer_sets(gp, world).atom_sets(gp)}
            brute = {frozenset(m) for m in stable_models_brute(rules, chosen, universe)}
            assert fast == brute, f"seed {seed}, world {bits}"
            consistent = consistent and bool(brute)
        if not consistent:
            continue  # credal bounds undefined; solver agreement still verified
        pos, neg = random_query_literals(seed, program)
        query = Query(tuple(pos), tuple(neg))
        low_poly = extract_poly(program, query, "lower")
        up_poly = extract_poly(program, query, "upper")
        n = len(program.learnable_facts())
        rng = SplitMix64(seed).split(99)
        for _ in range(20):
            theta = tuple(rng.random() for _ in range(n))
            b = credal_query(program, query, theta)
            assert poly_eval(low_poly, theta) == pytest.approx(b.lower, abs=1e-9)
            assert poly_eval(up_poly, theta) == pytest.approx(b.upper, abs=1e-9)
        checked += 1
    assert time.perf_counter() - t0 < 120.0


def test_criterion_5_gradients_match_finite_differences():
    rng = SplitMix64(2024)
    h = 1e-6
    for _ in range(100):
        n_vars = rng.randint(1, 8)
        coeffs = {}
        for _ in range(rng.randint(1, 10)):
            support = frozenset(j for j in range(n_vars) if rng.randint(0, 1))
            coeffs[support] = coeffs.get(support, 0.0) + (rng.random() * 4 - 2)
        poly = SymPoly(n_vars, coeffs)
        theta = [0.05 + 0.9 * rng.random() for _ in range(n_vars)]
        exact = poly_grad(poly, theta)
        for j in range(n_vars):
            hi = list(theta)
            lo = list(theta)
            hi[j] += h
            lo[j] -= h
            fd = (poly_eval(poly, hi) - poly_eval(poly, lo)) / (2 * h)
            rel = abs(exact[j] - fd) / max(1.0, abs(exact[j]), abs(fd))
            assert rel < 1e-6


def test_criterion_6_em_closed_form_oracles():
    coin = parse_program("learnable(0.3)::heads.")
    data = parse_interpretations("heads.\nnot heads.\n")
    cfg = LearnConfig(method="em")
    assert cfg.eps_ll == 5e-4  # default convergence threshold, exactly
    result = learn_em(coin, data, cfg)
    assert result.params[0] == pytest.approx(0.5, abs=1e-6)
    assert result.final_ll == pytest.approx(2 * math.log(0.5), abs=1e-6)

    single = parse_interpretations("heads.\n")
    result = learn_em(coin, single, cfg)
    assert result.params == (1.0,)
    assert result.ll_trace[1] == 0.0  # optimum reached after the first update


def _informative_instances(family, size, counts):
    """First len(counts) seeds whose draw leaves both methods room to move.

    Strict improvement over the baseline is only testable when (a) the data
    is not already at the likelihood optimum and (b) the EM expectations
    actually shift some parameter — for coloring, draws without a
    same-color adjacent pair observed alongside `valid` pin every EM
    conditional to 1 and the update is a no-op.
    """
    found = []
    seed = 0
    while len(found) < len(counts):
        spec = DatasetSpec(family, size, counts[len(found)], seed=seed)
        program, interps = generate(spec)
        theta0 = tuple(pf.prob for pf in program.learnable_facts())
        polys = [
            extract_poly(program, interpretation_query(i), "upper") for i in interps
        ]
        baseline = ll_objective(polys, theta0)
        update = em_maximization(em_expectation(program, interps, theta0), theta0)
        em_moves = any(abs(u - t) > 1e-12 for u, t in zip(update, theta0))
        if baseline < -1e-9 and em_moves:
            found.append((seed, program, interps, baseline))
        seed += 1
    return found


def test_criterion_7_optimization_vs_em_on_generated_instances():
    t0 = time.perf_counter()
    counts = [5, 10, 15, 20, 10]
    wins = 0
    total = 0
    for family, size in (("coloring", 4), ("path", 10)):
        for seed, program, interps, baseline in _informative_instances(
            family, size, counts
        ):
            opt = learn_opt(program, interps, LearnConfig(method="opt", seed=seed))
            em = learn_em(program, interps, LearnConfig(method="em", seed=seed))
            assert opt.final_ll > baseline, (family, seed)
            assert em.final_ll > baseline, (family, seed)
            total += 1
            if opt.final_ll >= em.final_ll - 1e-3:
                wins += 1
    assert wins >= 0.9 * total, f"optimization matched EM on only {wins}/{total}"
    assert time.perf_counter() - t0 < 600.0


def test_criterion_8_degenerate_conditionals_and_inconsistency():
    # two answer sets per world: evidence q pins the lower clause to 1
    loop = parse_program("0.5::z.\nq :- not r.\nr :- not q.")
    b = credal_conditional(loop, q("q"), q("q"))
    assert (b.lower, b.upper) == (1.0, 1.0)
    # r and q never coexist: upper clause pinned to 0
    b = credal_conditional(loop, q("r"), q("q"))
    assert (b.lower, b.upper) == (0.0, 0.0)
    # evidence impossible in every answer set of every world
    flat = parse_program("0.5::a.\nq :- a.")
    with pytest.raises(UndefinedConditional):
        credal_conditional(flat, q("q"), q("r"))
    contradictory = parse_program("0.5::a.\n:- a.")
    assert check_consistency(contradictory) == 1
    with pytest.raises(InconsistentWorld):
        credal_query(contradictory, q("a"))


def test_criterion_9_end_to_end_reproducibility(tmp_path, capsys):
    gen_args = [
        "gen", "--family", "smoke", "--size", "2",
        "--interpretations", "5", "--seed", "11",
    ]
    assert cli_main(gen_args + ["--out", str(tmp_path / "a")]) == 0
    assert cli_main(gen_args + ["--out", str(tmp_path / "b")]) == 0
    capsys.readouterr()
    for name in ("instance.pasp", "instance.int"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    learn_args = [
        "learn",
        "--program", str(tmp_path / "a" / "instance.pasp"),
        "--interpretations", str(tmp_path / "a" / "instance.int"),
        "--json", "--seed", "5",
    ]
    assert cli_main(learn_args) == 0
    first = capsys.readouterr().out
    assert cli_main(learn_args) == 0
    second = capsys.readouterr().out
    assert first == second
    json.loads(first)
