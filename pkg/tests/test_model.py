import itertools
import random

import pytest

from elpq.errors import NonGroundError
from elpq.model import (Atom, DependencyGraph, EpiElement, Literal, ProgramClass, Query, Rule, Term, atom, classify,
                        dependency_graph, is_nonneg, lit, term)
from elpq.parser import parse_program


def test_term_kinds():
    assert term("X").is_variable
    assert not term("a").is_variable
    assert not term("42").is_variable
    assert not term('"Hello world"').is_variable
    for bad in [("variable", "x"), ("constant", "X"), ("constant", ""), ("variable", ""), ("other", "a")]:
        with pytest.raises(ValueError):
            Term(*bad)


def test_literal_double_negation_normalizes():
    l = lit("a")
    assert -(-l) == l
    assert str(-l) == "-a"


def test_k_and_m_desugar():
    a = lit("a")
    assert EpiElement.K(a) == EpiElement(a, True)
    assert EpiElement.M(a) == EpiElement(-a, False)
    assert EpiElement.M(-a) == EpiElement(a, False)
    assert str(EpiElement.K(-a)) == "K -a"


def test_rule_shapes():
    r = Rule(frozenset(), frozenset({atom("a")}))
    assert r.is_constraint
    f = Rule(frozenset({atom("a")}))
    assert f.is_fact
    assert Rule(frozenset({atom("p", "X")}), frozenset({atom("q", "X", "Y")})).vars == {term("X"), term("Y")}


def test_query_rejects_variables():
    with pytest.raises(NonGroundError):
        Query(frozenset({("K", lit("p", "X"))}))
    with pytest.raises(ValueError):
        Query(frozenset({("B", lit("p"))}))


def test_dependency_graph_examples():
    g = dependency_graph(parse_program("b :- a."))
    assert g.edges == {(atom("a"), atom("b"))}
    g = dependency_graph(parse_program("b :- knot -a."))
    assert g.edges == {(atom("a"), atom("b"))}
    g = dependency_graph(parse_program("b :- K a."))
    assert g.edges == {(atom("a"), atom("b"))}
    g = dependency_graph(parse_program("b :- M a."))
    assert g.edges == {(atom("a"), atom("b"))}
    g = dependency_graph(parse_program("b :- knot a, not c."))
    assert g.edges == set()
    g = dependency_graph(parse_program("a :- b. b :- a."))
    assert sorted(map(str, g.find_cycle())) == ["a", "b"]


def test_dependency_graph_ground_flag():
    P = parse_program("p(X) :- q(X).")
    with pytest.raises(NonGroundError):
        dependency_graph(P.rules, ground=True)
    g = dependency_graph(P.rules, ground=False)
    assert g.edges == {("q", "p")}


def test_classify_examples():
    assert classify(parse_program("a :- b. b :- K a.")) is ProgramClass.NORMAL
    assert classify(parse_program("")) is ProgramClass.NONNEG
    with open("tests/data/scholarship.elp") as fh:
        assert classify(parse_program(fh.read())) is ProgramClass.DISJ
    assert classify(parse_program("a :- K b. b :- M c.")) is ProgramClass.NONNEG
    assert classify(parse_program("a :- not b.")) is ProgramClass.TIGHT
    assert classify(parse_program("a :- knot b.")) is ProgramClass.TIGHT
    assert classify(parse_program("a :- not b. b :- not a.")) is ProgramClass.TIGHT
    assert classify(parse_program("a :- b. b :- a.")) is ProgramClass.NORMAL


def test_is_nonneg_is_syntactic():
    assert is_nonneg(parse_program("a :- K b, M c. :- a.").rules)
    assert not is_nonneg(parse_program("a :- K -b.").rules)
    assert not is_nonneg(parse_program("a :- M -b.").rules)
    assert not is_nonneg(parse_program("a :- knot b.").rules)
    assert not is_nonneg(parse_program("a v b.").rules)


def _brute_has_cycle(vertices, edges):
    succ = {v: {b for a, b in edges if a == v} for v in vertices}
    # a cycle exists iff some vertex reaches itself by a path of length >= 1
    for v in vertices:
        seen, frontier = set(), set(succ[v])
        while frontier:
            if v in frontier:
                return True
            seen |= frontier
            frontier = {w for u in frontier for w in succ[u]} - seen
    return False


def test_cycle_detector_against_path_enumeration():
    rng = random.Random(7)
    for _ in range(400):
        n = rng.randint(1, 8)
        vs = list(range(n))
        edges = {(a, b) for a, b in itertools.product(vs, vs) if rng.random() < 0.15}
        g = DependencyGraph(set(vs), edges)
        cyc = g.find_cycle()
        assert (cyc is not None) == _brute_has_cycle(vs, edges)
        if cyc is not None:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                assert (a, b) in edges


def test_tight_implies_acyclic_and_deletion_monotone():
    rng = random.Random(3)
    atoms = [Atom(x) for x in "abcde"]
    for _ in range(300):
        rules = []
        for _ in range(rng.randint(1, 6)):
            head = frozenset(rng.sample(atoms, rng.randint(0, 2)))
            pos = frozenset(rng.sample(atoms, rng.randint(0, 2)))
            epi = frozenset(EpiElement(Literal(a, rng.random() < 0.5), rng.random() < 0.5)
                            for a in rng.sample(atoms, rng.randint(0, 1)))
            rules.append(Rule(head, pos, frozenset(), epi))
        c = classify(rules)
        if c in (ProgramClass.TIGHT, ProgramClass.NONNEG):
            assert dependency_graph(rules).find_cycle() is None
        if c is not ProgramClass.DISJ:
            for i in range(len(rules)):
                assert classify(rules[:i] + rules[i + 1:]) is not ProgramClass.DISJ
