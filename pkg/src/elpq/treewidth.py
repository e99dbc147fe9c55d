"""Primal graphs, heuristic tree decompositions, nice TDs and bag-wise grounding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree, treewidth_min_fill_in

from .errors import BudgetExceeded, InvalidDecomposition, NonGroundError, UncoveredRule
from .grounder import DEFAULT_GROUND_BUDGET, GroundProgram, ground_rule, herbrand_universe, instantiation_count
from .model import Atom, Program, Rule, Term

HEURISTICS = {"min-fill": treewidth_min_fill_in, "min-degree": treewidth_min_degree}


def _vkey(v):
    return v.sort_key() if isinstance(v, Atom) else (v, ())


@dataclass
class PrimalGraph:
    vertices: set = field(default_factory=set)
    edges: set = field(default_factory=set)  # frozenset pairs

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=_vkey)

    def add_clique(self, vs: Iterable):
        vs = list(dict.fromkeys(vs))
        self.vertices.update(vs)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                self.edges.add(frozenset((a, b)))


def primal_graph(P: Program | GroundProgram | Iterable[Rule], mode: str = "predicate") -> PrimalGraph:
    """Co-occurrence graph over ground atoms (``mode="ground"``) or predicate names."""
    rules = P.rules if isinstance(P, (Program, GroundProgram)) else list(P)
    g = PrimalGraph()
    if mode == "ground":
        for r in rules:
            if not r.is_ground():
                raise NonGroundError("ground primal graph of a non-ground rule")
            g.add_clique(r.atoms())
    elif mode == "predicate":
        for r in rules:
            g.add_clique(a.predicate for a in r.atoms())
    else:
        raise ValueError(f"unknown primal graph mode {mode!r}")
    return g


@dataclass
class TreeDecomp:
    """Rooted tree given by parent pointers; ``kinds`` is filled for nice TDs."""

    bags: list[frozenset]
    parent: list[int | None]
    root: int = 0
    kinds: list[str] | None = None

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                out[p].append(i)
        return out

    def preorder(self) -> list[int]:
        ch = self.children()
        order, stack = [], [self.root]
        while stack:
            t = stack.pop()
            order.append(t)
            stack.extend(reversed(ch[t]))
        return order

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(p, i) for i, p in enumerate(self.parent) if p is not None]


def validate(td: TreeDecomp, graph: PrimalGraph) -> list[str]:
    """Problems with ``td`` as a decomposition of ``graph``; empty if valid."""
    problems = []
    n = len(td.bags)
    if n == 0:
        return ["decomposition has no nodes"]
    roots = [i for i, p in enumerate(td.parent) if p is None]
    if roots != [td.root]:
        problems.append(f"expected exactly one root {td.root}, found {roots}")
        return problems
    if len(td.preorder()) != n:
        return ["parent pointers do not form a single tree"]
    for i, bag in enumerate(td.bags):
        extra = bag - graph.vertices
        if extra:
            problems.append(f"bag {i} has non-vertices {sorted(map(str, extra))}")
    covered = set().union(*td.bags)
    for v in graph.vertices - covered:
        problems.append(f"vertex {v} in no bag")
    for e in graph.edges:
        if not any(e <= b for b in td.bags):
            problems.append(f"edge {sorted(map(str, e))} in no bag")
    tops: dict = {}
    for i, bag in enumerate(td.bags):
        p = td.parent[i]
        for v in bag:
            if p is None or v not in td.bags[p]:
                tops[v] = tops.get(v, 0) + 1
    for v, k in tops.items():
        if k > 1:
            problems.append(f"occurrences of {v} are not connected")
    return problems


def decompose(graph: PrimalGraph, heuristic: str = "min-fill") -> TreeDecomp:
    """Heuristic tree decomposition; bags are over the graph's vertices."""
    try:
        algo = HEURISTICS[heuristic]
    except KeyError:
        raise ValueError(f"unknown heuristic {heuristic!r}") from None
    verts = graph.sorted_vertices()
    if not verts:
        return TreeDecomp([frozenset()], [None], 0)
    ids = {v: i for i, v in enumerate(verts)}
    G = nx.Graph()
    G.add_nodes_from(range(len(verts)))
    G.add_edges_from(sorted(tuple(sorted(ids[v] for v in e)) for e in graph.edges))
    _, T = algo(G)
    nodes = sorted(T.nodes, key=lambda b: (-len(b), sorted(b)))
    root = nodes[0]
    order, parent_of = [root], {root: None}
    i = 0
    while i < len(order):
        t = order[i]
        i += 1
        for nb in sorted(T.neighbors(t), key=lambda b: (-len(b), sorted(b))):
            if nb not in parent_of:
                parent_of[nb] = t
                order.append(nb)
    num = {t: k for k, t in enumerate(order)}
    bags = [frozenset(verts[j] for j in t) for t in order]
    parent = [None if parent_of[t] is None else num[parent_of[t]] for t in order]
    return TreeDecomp(bags, parent, 0)


# -- nice decompositions


def node_kind(td: TreeDecomp, t: int, children: list[list[int]] | None = None) -> str | None:
    ch = (children or td.children())[t]
    bag = td.bags[t]
    if not ch:
        return "leaf"
    if len(ch) == 2:
        a, b = ch
        if bag and td.bags[a] == bag == td.bags[b]:
            return "join"
        return None
    if len(ch) == 1:
        c = td.bags[ch[0]]
        if c <= bag and len(bag) == len(c) + 1:
            return "introduce"
        if c >= bag and len(c) == len(bag) + 1:
            return "remove"
    return None


def is_nice(td: TreeDecomp) -> bool:
    ch = td.children()
    if td.bags[td.root]:
        return False
    for t in range(len(td.bags)):
        k = node_kind(td, t, ch)
        if k is None or (k == "leaf" and td.bags[t]):
            return False
    return True


def make_nice(td: TreeDecomp) -> TreeDecomp:
    """Equivalent nice TD of the same width (returned as is if already nice)."""
    if is_nice(td):
        kinds = [node_kind(td, t) for t in range(len(td.bags))]
        return TreeDecomp(list(td.bags), list(td.parent), td.root, kinds)

    # contract children whose bag is contained in the parent's
    bags = list(td.bags)
    ch = td.children()
    merged_children: dict[int, list[int]] = {}

    def absorb(t: int) -> list[int]:
        out = []
        for c in ch[t]:
            if bags[c] <= bags[t]:
                out.extend(absorb_into(c, t))
            else:
                out.append(c)
        return out

    def absorb_into(c: int, t: int) -> list[int]:
        out = []
        for g in ch[c]:
            if bags[g] <= bags[t]:
                out.extend(absorb_into(g, t))
            else:
                out.append(g)
        return out

    stack = [td.root]
    while stack:
        t = stack.pop()
        merged_children[t] = absorb(t)
        stack.extend(merged_children[t])
    for t, cs in merged_children.items():
        if len(cs) > 1 and not bags[t]:
            # join bags must be non-empty
            bags[t] = frozenset({min(bags[cs[0]], key=_vkey)})

    new_bags: list[frozenset] = []
    new_parent: list[int | None] = []
    kinds: list[str] = []

    def node(bag, kind, children=()):
        i = len(new_bags)
        new_bags.append(frozenset(bag))
        new_parent.append(None)
        kinds.append(kind)
        for c in children:
            new_parent[c] = i
        return i

    def chain(top: int, target: frozenset) -> int:
        cur = new_bags[top]
        for v in sorted(cur - target, key=_vkey):
            cur = cur - {v}
            top = node(cur, "remove", [top])
        for v in sorted(target - cur, key=_vkey):
            cur = cur | {v}
            top = node(cur, "introduce", [top])
        return top

    def build(t: int) -> int:
        target = bags[t]
        cs = merged_children[t]
        if not cs:
            return chain(node((), "leaf"), target)
        tops = [chain(build(c), target) for c in cs]
        cur = tops[0]
        for other in tops[1:]:
            cur = node(target, "join", [cur, other])
        return cur

    top = chain(build(td.root), frozenset())
    return TreeDecomp(new_bags, new_parent, top, kinds)


# -- bag-wise grounding


def assign_rules(P: Program, td: TreeDecomp) -> list[list[Rule]]:
    """Each rule goes to the first bag (root-to-leaf preorder) holding its predicates."""
    order = td.preorder()
    out: list[list[Rule]] = [[] for _ in td.bags]
    for r in P.rules:
        preds = {a.predicate for a in r.atoms()}
        for t in order:
            if preds <= td.bags[t]:
                out[t].append(r)
                break
        else:
            raise UncoveredRule(f"no bag covers the predicates {sorted(preds)}")
    return out


def _connect(td: TreeDecomp, bags: list[set]) -> None:
    """Close ground bags under the connectedness condition (in place)."""
    depth = {td.root: 0}
    for t in td.preorder():
        p = td.parent[t]
        if p is not None:
            depth[t] = depth[p] + 1
    where: dict = {}
    for t, bag in enumerate(bags):
        for v in bag:
            where.setdefault(v, []).append(t)
    for v, nodes in where.items():
        if len(nodes) < 2:
            continue
        # walk every occurrence up to the common ancestor
        frontier = set(nodes)
        while len(frontier) > 1:
            deepest = max(frontier, key=lambda t: depth[t])
            frontier.discard(deepest)
            p = td.parent[deepest]
            bags[p].add(v)
            frontier.add(p)


def bag_ground(P: Program, td: TreeDecomp, budget: int = DEFAULT_GROUND_BUDGET) -> tuple[GroundProgram, TreeDecomp]:
    """Ground every bag program separately and lift the TD to ground atoms.

    The lifted bag of node t holds the instantiations of the atoms of the
    rules assigned to t, plus whatever ground atoms are needed to keep each
    atom's occurrences connected.
    """
    problems = validate(td, primal_graph(P, "predicate"))
    coverage = [p for p in problems if "in no bag" in p]
    if problems and len(coverage) != len(problems):
        raise InvalidDecomposition("; ".join(problems))
    per_bag = assign_rules(P, td)
    hu = [Term("constant", c) for c in herbrand_universe(P)]
    needed = instantiation_count(P)
    if needed > budget:
        raise BudgetExceeded("grounding", needed, budget)
    all_rules: set[Rule] = set()
    ground_bags: list[set] = []
    for rules in per_bag:
        bag: set = set()
        for r in rules:
            for g in ground_rule(r, hu):
                all_rules.add(g)
                bag.update(g.atoms())
        ground_bags.append(bag)
    _connect(td, ground_bags)
    gp = GroundProgram.from_rules(all_rules)
    return gp, TreeDecomp([frozenset(b) for b in ground_bags], list(td.parent), td.root)


# -- PACE td format


def to_pace(td: TreeDecomp, graph: PrimalGraph) -> str:
    verts = graph.sorted_vertices()
    ids = {v: i for i, v in enumerate(verts, start=1)}
    lines = [f"c vertex {ids[v]} {v}" for v in verts]
    lines.append(f"s td {len(td.bags)} {td.width + 1} {len(verts)}")
    for t, bag in enumerate(td.bags, start=1):
        lines.append(" ".join(["b", str(t)] + [str(x) for x in sorted(ids[v] for v in bag)]))
    for p, c in sorted(td.tree_edges()):
        lines.append(f"{p + 1} {c + 1}")
    return "\n".join(lines) + "\n"


def parse_pace(text: str) -> tuple[list[frozenset[int]], list[tuple[int, int]], int]:
    """Bags (vertex ids), tree edges (0-based nodes) and vertex count of a .td file."""
    bags: list[frozenset[int]] = []
    edges = []
    nverts = 0
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            nb, nverts = int(parts[2]), int(parts[4])
            bags = [frozenset()] * nb
        elif parts[0] == "b":
            bags[int(parts[1]) - 1] = frozenset(int(x) for x in parts[2:])
        else:
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
    return bags, edges, nverts
