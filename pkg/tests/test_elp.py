import random

import pytest

from elpq.asp import answer_sets
from elpq.elp import (WorldView, check_compatibility, count_world_views, derive_wvi, enumerate_world_views,
                      epistemic_reduct, inner_literals, solve_nonneg)
from elpq.errors import BudgetExceeded, EmptyCollection, WrongFragment
from elpq.grounder import GroundProgram, ground
from elpq.model import Atom, EpiElement, Literal, Rule, atom, lit
from elpq.parser import parse_program, serialize_rules

from helpers import format_wvis, oracle_world_views, random_ground_elp, random_plain_rules

A, B, C = atom("a"), atom("b"), atom("c")


def gp(text):
    return ground(parse_program(text))


def strs(lits):
    return sorted(str(l) for l in lits)


def test_reduct_examples():
    P = gp("v :- knot v.")
    v = lit("v")
    assert serialize_rules(epistemic_reduct(P, {v: False}).rules) == "v.\n"
    assert serialize_rules(epistemic_reduct(P, {v: True}).rules) == "v :- not v.\n"
    P = gp("b :- K a.")
    assert serialize_rules(epistemic_reduct(P, {lit("a"): True}).rules) == "b :- a.\n"
    assert epistemic_reduct(P, {lit("a"): False}).rules == ()
    # double negation: knot -a with -a in I gives a positive body atom
    P = gp("b :- knot -a.")
    assert serialize_rules(epistemic_reduct(P, {lit("a", positive=False): True}).rules) == "b :- a.\n"
    P = gp("b :- K -a.")
    assert serialize_rules(epistemic_reduct(P, {lit("a", positive=False): True}).rules) == "b :- not a.\n"


def test_derive_wvi():
    assert strs(derive_wvi([{A}, {A, B}], [A, B, C])) == ["-c", "a"]
    assert strs(derive_wvi([set()], [A])) == ["-a"]
    assert strs(derive_wvi([{A}], [A])) == ["a"]
    with pytest.raises(EmptyCollection):
        derive_wvi([], [A])


def test_compatibility():
    a = Literal(A)
    assert check_compatibility({a}, [{A}], [A])
    assert not check_compatibility(set(), [{A}], [A])
    assert not check_compatibility({a}, [], [A])
    assert not check_compatibility({a, -a}, [{A}], [A])
    assert check_compatibility(set(), [{A}, set()], [A])


def test_enumerate_examples():
    assert enumerate_world_views(gp("v :- knot v.")) == []
    (wv,) = enumerate_world_views(GroundProgram.from_rules([]), keep_witnesses=True)
    assert wv.wvi == frozenset() and wv.witness_count == 1 and wv.witnesses == (frozenset(),)
    assert count_world_views(gp("a :- knot b. b :- knot a.")) == 2
    assert count_world_views(gp(":- . a.")) == 0


def test_scholarship():
    P = gp(open("tests/data/scholarship.elp").read())
    for strategy in ("pruned", "exhaustive"):
        (wv,) = enumerate_world_views(P, strategy=strategy, keep_witnesses=True)
        assert wv.witness_count == 2 == len(wv.witnesses)
        assert len(wv.wvi) == 11
        assert {"-lowGPA(mia)", "-highGPA(mark)"} <= {str(l) for l in wv.wvi}


def test_witnesses_are_answer_sets_of_reduct():
    P = gp("a v b :- knot c. c :- K a.")
    for wv in enumerate_world_views(P, keep_witnesses=True):
        G = {l: l in wv.wvi for l in inner_literals(P)}
        assert set(wv.witnesses) == answer_sets(epistemic_reduct(P, G))


def test_guess_budget():
    P = gp("a :- knot b. b :- knot c. c :- knot a.")
    with pytest.raises(BudgetExceeded):
        enumerate_world_views(P, guess_budget=2)
    assert count_world_views(P, guess_budget=3) == count_world_views(P)


def test_epistemic_free_programs():
    for seed in range(150):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        rules = random_plain_rules(rng, n, rng.randint(1, 8))
        P = GroundProgram.from_rules(rules)
        sets = answer_sets(P)
        wvs = enumerate_world_views(P)
        assert len(wvs) == (1 if sets else 0)
        if sets:
            assert wvs[0].wvi == derive_wvi(sets, P.atoms)


def test_small_oracle_sample_and_strategies():
    for seed in range(120):
        P = random_ground_elp(random.Random(seed))
        pruned = enumerate_world_views(P)
        assert format_wvis(w.wvi for w in pruned) == format_wvis(oracle_world_views(P))
        exhaustive = enumerate_world_views(P, strategy="exhaustive", method="enumerate")
        assert pruned == exhaustive


def test_jobs_do_not_change_result():
    P = gp("a :- knot b. b :- knot a. c v d :- knot c. e :- knot -e, K a.")
    assert enumerate_world_views(P, jobs=3) == enumerate_world_views(P)


def test_renaming_invariance():
    rng = random.Random(9)
    for seed in range(60):
        P = random_ground_elp(random.Random(seed))
        perm = {a: Atom(f"z{rng.randint(0, 10**6)}_{i}") for i, a in enumerate(P.atoms)}

        def ren_lit(l):
            return Literal(perm[l.atom], l.positive)

        rules = [Rule(frozenset(perm[a] for a in r.head), frozenset(perm[a] for a in r.body_pos),
                      frozenset(perm[a] for a in r.body_neg),
                      frozenset(EpiElement(ren_lit(e.inner), e.negated_operator) for e in r.body_epi))
                 for r in P.rules]
        assert count_world_views(GroundProgram.from_rules(rules)) == count_world_views(P)


def test_solve_nonneg_examples():
    wv = solve_nonneg(gp("a. b :- K a."))
    assert strs(wv.wvi) == ["a", "b"]
    assert solve_nonneg(gp("a. :- a.")) is None
    assert strs(solve_nonneg(gp("c :- M c.")).wvi) == ["-c"]
    with pytest.raises(WrongFragment):
        solve_nonneg(gp("a :- not b."))
    with pytest.raises(WrongFragment):
        solve_nonneg(gp("a :- knot b."))
    assert isinstance(wv, WorldView)
