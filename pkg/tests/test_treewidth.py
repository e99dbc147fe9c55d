import itertools
import random

import pytest

from elpq.elp import count_world_views
from elpq.errors import InvalidDecomposition, UncoveredRule
from elpq.grounder import ground, herbrand_universe
from elpq.parser import parse_program, serialize_rules
from elpq.treewidth import (PrimalGraph, TreeDecomp, bag_ground, decompose, is_nice, make_nice, parse_pace,
                            primal_graph, to_pace, validate)

from helpers import random_safe_program

SCHOLARSHIP = parse_program(open("tests/data/scholarship.elp").read())


def graph(edges, vertices=()):
    g = PrimalGraph(set(vertices))
    for a, b in edges:
        g.add_clique([a, b])
    return g


def test_primal_graph_examples():
    g = primal_graph(parse_program("p(X) :- q(X). r(X) :- q(X)."))
    assert g.edges == {frozenset("pq"), frozenset("qr")}
    g = primal_graph(parse_program("a :- b, not c, knot d, K e."))
    assert len(g.edges) == 10
    g = primal_graph(ground(SCHOLARSHIP), "ground")
    assert len(g.vertices) == 15
    expected = set()
    for r in ground(SCHOLARSHIP).rules:
        expected |= {frozenset(p) for p in itertools.combinations(set(r.atoms()), 2)}
    assert g.edges == expected


def test_decompose_examples():
    assert decompose(graph([("a", "b"), ("b", "c")])).width == 1
    clique = graph(itertools.combinations("abcd", 2))
    for h in ("min-fill", "min-degree"):
        assert decompose(clique, h).width == 3
    empty = decompose(PrimalGraph())
    assert empty.bags == [frozenset()] and empty.width <= 0
    assert decompose(PrimalGraph({"a"})).width == 0
    with pytest.raises(ValueError):
        decompose(clique, "exact")


def test_validator_rejects_bad_decompositions():
    g = graph([("a", "b"), ("b", "c")])
    assert validate(TreeDecomp([frozenset("ab"), frozenset("bc")], [None, 0]), g) == []
    assert validate(TreeDecomp([frozenset("ab")], [None]), g)  # c missing
    assert validate(TreeDecomp([frozenset("ab"), frozenset("c")], [None, 0]), g)  # edge bc missing
    bad_conn = TreeDecomp([frozenset("ab"), frozenset("c"), frozenset("bc")], [None, 0, 1])
    assert any("connected" in p for p in validate(bad_conn, g))
    assert validate(TreeDecomp([frozenset("abc"), frozenset("c")], [None, None]), g)  # two roots
    assert validate(TreeDecomp([frozenset("abz")], [None]), graph([("a", "b")]))  # foreign vertex


def test_random_graphs_decompose_validly():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(0, 9)
        es = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.3]
        g = graph(es, range(n))
        for h in ("min-fill", "min-degree"):
            td = decompose(g, h)
            assert validate(td, g) == []
            nice = make_nice(td)
            assert validate(nice, g) == [] and is_nice(nice) and nice.width == td.width


def test_make_nice_structure():
    td = decompose(graph([("a", "b"), ("b", "c")]))
    nice = make_nice(td)
    assert is_nice(nice)
    assert set(nice.kinds) <= {"leaf", "introduce", "remove"}
    assert nice.bags[nice.root] == frozenset()
    star = TreeDecomp([frozenset("ab"), frozenset("bc"), frozenset("bd")], [None, 0, 0])
    nice = make_nice(star)
    assert "join" in nice.kinds and is_nice(nice) and nice.width == 1
    ch = nice.children()
    for t, k in enumerate(nice.kinds):
        if k == "join":
            assert all(nice.bags[c] == nice.bags[t] for c in ch[t])
        if k == "leaf":
            assert nice.bags[t] == frozenset() and not ch[t]
    again = make_nice(nice)
    assert again.bags == nice.bags and again.parent == nice.parent


def test_bag_ground_chain_width_bound():
    P = parse_program("p(X) :- q(X). q(X) :- r(X). r(1). r(2).")
    td = decompose(primal_graph(P))
    gp, gtd = bag_ground(P, td)
    d = len(herbrand_universe(P))
    assert gtd.width <= 2 * d - 1
    assert set(gp.rules) == set(ground(P).rules)


def test_bag_ground_single_bag():
    P = parse_program("p(X) :- q(X), not r(X). q(a). r(b).")
    g = primal_graph(P)
    td = TreeDecomp([frozenset(g.vertices)], [None])
    gp, _ = bag_ground(P, td)
    assert serialize_rules(gp.rules) == serialize_rules(ground(P).rules)


def test_bag_ground_example1_same_count():
    td = decompose(primal_graph(SCHOLARSHIP))
    gp, gtd = bag_ground(SCHOLARSHIP, td)
    assert count_world_views(gp) == count_world_views(ground(SCHOLARSHIP)) == 1
    assert validate(gtd, primal_graph(gp, "ground")) == []


def test_bag_ground_errors():
    P = parse_program("p :- q, r.")
    with pytest.raises(UncoveredRule):
        bag_ground(P, TreeDecomp([frozenset("pq"), frozenset("r")], [None, 0]))
    Q = parse_program("a :- b. b :- c.")
    with pytest.raises(InvalidDecomposition):
        bag_ground(Q, TreeDecomp([frozenset("ab"), frozenset("a"), frozenset("bc")], [None, 0, 1]))


def test_bag_ground_random_programs():
    for seed in range(100):
        P = random_safe_program(random.Random(seed))
        g = primal_graph(P)
        td = make_nice(decompose(g)) if seed % 2 else decompose(g)
        gp, gtd = bag_ground(P, td)
        assert set(gp.rules) == set(ground(P).rules)
        assert validate(gtd, primal_graph(gp, "ground")) == []
        d = len(herbrand_universe(P))
        a = max([x.arity for x in P.atoms()] + [0])
        for small, big in zip(td.bags, gtd.bags):
            assert len(big) <= len(small) * d ** a


def test_pace_round_trip():
    g = primal_graph(SCHOLARSHIP)
    td = decompose(g)
    text = to_pace(td, g)
    assert text.splitlines()[len(g.vertices)] == f"s td {len(td.bags)} {td.width + 1} {len(g.vertices)}"
    bags, edges, n = parse_pace(text)
    assert n == len(g.vertices) and len(bags) == len(td.bags)
    assert sorted(edges) == sorted(td.tree_edges())
    assert [len(b) for b in bags] == [len(b) for b in td.bags]
