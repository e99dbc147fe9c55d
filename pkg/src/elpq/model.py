"""Syntax objects for epistemic logic programs and structural classification.

K and M never appear in this model: ``K l`` is stored as
``EpiElement(l, negated_operator=True)`` (that is, ``not knot l`` in the
classical sense) and ``M l`` as ``EpiElement(-l, negated_operator=False)``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import NonGroundError

_VAR_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_CONST_RE = re.compile(r'(_*[a-z][A-Za-z0-9_]*|[0-9]+|"[^"\\\n]*")\Z')


@dataclass(frozen=True, order=True)
class Term:
    kind: str  # "constant" | "variable"
    name: str

    def __post_init__(self):
        if self.kind == "variable":
            if not _VAR_RE.match(self.name):
                raise ValueError(f"bad variable name {self.name!r}")
        elif self.kind == "constant":
            if not _CONST_RE.match(self.name):
                raise ValueError(f"bad constant name {self.name!r}")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    @property
    def is_variable(self) -> bool:
        return self.kind == "variable"

    def __str__(self):
        return self.name


def term(name: str) -> Term:
    """Build a term, inferring its kind from the first character."""
    kind = "variable" if name[:1].isupper() else "constant"
    return Term(kind, name)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def vars(self) -> frozenset[Term]:
        return frozenset(t for t in self.args if t.is_variable)

    def is_ground(self) -> bool:
        return not any(t.is_variable for t in self.args)

    def sort_key(self):
        return (self.predicate, tuple(t.name for t in self.args))

    def substitute(self, sub: dict[Term, Term]) -> "Atom":
        if not self.args:
            return self
        return Atom(self.predicate, tuple(sub.get(t, t) for t in self.args))

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(t.name for t in self.args)})"


def atom(predicate: str, *args: str) -> Atom:
    return Atom(predicate, tuple(term(a) for a in args))


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def sort_key(self):
        return (self.atom.sort_key(), not self.positive)

    def __str__(self):
        return str(self.atom) if self.positive else f"-{self.atom}"


def lit(predicate: str, *args: str, positive: bool = True) -> Literal:
    return Literal(atom(predicate, *args), positive)


@dataclass(frozen=True)
class EpiElement:
    """``knot inner`` when ``negated_operator`` is false, ``K inner`` otherwise."""

    inner: Literal
    negated_operator: bool = False

    @classmethod
    def K(cls, inner: Literal) -> "EpiElement":
        return cls(inner, True)

    @classmethod
    def M(cls, inner: Literal) -> "EpiElement":
        return cls(-inner, False)

    @classmethod
    def knot(cls, inner: Literal) -> "EpiElement":
        return cls(inner, False)

    def sort_key(self):
        return (self.inner.sort_key(), self.negated_operator)

    def __str__(self):
        return f"K {self.inner}" if self.negated_operator else f"knot {self.inner}"


@dataclass(frozen=True)
class Rule:
    head: frozenset[Atom] = frozenset()
    body_pos: frozenset[Atom] = frozenset()
    body_neg: frozenset[Atom] = frozenset()
    body_epi: frozenset[EpiElement] = frozenset()

    def __post_init__(self):
        # accept any iterable from callers
        for name in ("head", "body_pos", "body_neg", "body_epi"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_fact(self) -> bool:
        return not (self.body_pos or self.body_neg or self.body_epi)

    def atoms(self) -> Iterator[Atom]:
        yield from self.head
        yield from self.body_pos
        yield from self.body_neg
        for e in self.body_epi:
            yield e.inner.atom

    @property
    def vars(self) -> frozenset[Term]:
        out: set[Term] = set()
        for a in self.atoms():
            out |= a.vars
        return frozenset(out)

    def is_ground(self) -> bool:
        return all(a.is_ground() for a in self.atoms())

    def substitute(self, sub: dict[Term, Term]) -> "Rule":
        return Rule(
            frozenset(a.substitute(sub) for a in self.head),
            frozenset(a.substitute(sub) for a in self.body_pos),
            frozenset(a.substitute(sub) for a in self.body_neg),
            frozenset(
                EpiElement(Literal(e.inner.atom.substitute(sub), e.inner.positive), e.negated_operator)
                for e in self.body_epi
            ),
        )


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = ()
    declared_constants: frozenset[str] | None = None

    def __post_init__(self):
        if not isinstance(self.rules, tuple):
            object.__setattr__(self, "rules", tuple(self.rules))

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def atoms(self) -> set[Atom]:
        return {a for r in self.rules for a in r.atoms()}

    def predicates(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for a in self.atoms():
            out.setdefault(a.predicate, a.arity)
        return out

    def is_ground(self) -> bool:
        return all(r.is_ground() for r in self.rules)


@dataclass(frozen=True)
class Query:
    """A set of ``(op, literal)`` items with ``op`` in ``{"K", "M"}``; ground only."""

    items: frozenset[tuple[str, Literal]] = frozenset()

    def __post_init__(self):
        if not isinstance(self.items, frozenset):
            object.__setattr__(self, "items", frozenset(self.items))
        for op, literal in self.items:
            if op not in ("K", "M"):
                raise ValueError(f"unknown query operator {op!r}")
            if not literal.atom.is_ground():
                raise NonGroundError(f"query item {op} {literal} is not ground")

    def sorted_items(self) -> list[tuple[str, Literal]]:
        return sorted(self.items, key=lambda it: (it[1].sort_key(), it[0]))

    def __len__(self):
        return len(self.items)

    def __str__(self):
        return ", ".join(f"{op} {l}" for op, l in self.sorted_items())


class ProgramClass(str, enum.Enum):
    NONNEG = "NonNeg"
    TIGHT = "Tight"
    NORMAL = "Normal"
    DISJ = "Disj"


@dataclass
class DependencyGraph:
    vertices: set = field(default_factory=set)
    edges: set = field(default_factory=set)

    def successors(self) -> dict:
        succ: dict = {v: [] for v in self.vertices}
        for a, b in self.edges:
            succ[a].append(b)
        return succ

    def find_cycle(self) -> list | None:
        """Return one directed cycle as a vertex list, or None."""
        succ = self.successors()
        for v in succ:
            succ[v].sort(key=_vertex_key)
        WHITE, GREY, BLACK = 0, 1, 2
        color = dict.fromkeys(succ, WHITE)
        for start in sorted(succ, key=_vertex_key):
            if color[start] != WHITE:
                continue
            color[start] = GREY
            path = [start]
            stack = [iter(succ[start])]
            while stack:
                nxt = next(stack[-1], None)
                if nxt is None:
                    color[path.pop()] = BLACK
                    stack.pop()
                elif color[nxt] == GREY:
                    return path[path.index(nxt):]
                elif color[nxt] == WHITE:
                    color[nxt] = GREY
                    path.append(nxt)
                    stack.append(iter(succ[nxt]))
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


def _vertex_key(v):
    return v.sort_key() if isinstance(v, Atom) else (v, ())


def _epistemic_source(e: EpiElement) -> Atom | None:
    # edge sources come from `knot -a` and `not knot a` (the K form)
    if e.negated_operator and e.inner.positive:
        return e.inner.atom
    if not e.negated_operator and not e.inner.positive:
        return e.inner.atom
    return None


def dependency_graph(program: Iterable[Rule], ground: bool = True) -> DependencyGraph:
    """Positive dependency graph with the epistemic edges added.

    With ``ground=True`` vertices are ground atoms, otherwise predicate names.
    """
    rules = list(program)
    if ground:
        for r in rules:
            if not r.is_ground():
                raise NonGroundError("dependency_graph(ground=True) on a non-ground rule")
        name = lambda a: a  # noqa: E731
    else:
        name = lambda a: a.predicate  # noqa: E731
    g = DependencyGraph()
    for r in rules:
        sources = [name(a) for a in r.body_pos]
        sources += [name(s) for s in map(_epistemic_source, r.body_epi) if s is not None]
        for h in r.head:
            g.vertices.add(name(h))
        g.vertices.update(sources)
        for h in r.head:
            for s in sources:
                g.edges.add((s, name(h)))
    return g


def is_nonneg(program: Iterable[Rule]) -> bool:
    """Negation- and disjunction-free; only ``K a`` / ``M a`` over atoms allowed."""
    for r in program:
        if len(r.head) > 1 or r.body_neg:
            return False
        for e in r.body_epi:
            # K a is (a, True); M a is (-a, False)
            if e.negated_operator != e.inner.positive:
                return False
    return True


def classify(program: Program | Iterable[Rule]) -> ProgramClass:
    """Most restrictive class in the chain NonNeg < Tight < Normal < Disj.

    Ground programs are checked on the atom-level dependency graph, non-ground
    ones on the predicate-level graph (acyclic there implies acyclic after
    grounding).
    """
    rules = list(program)
    if any(len(r.head) > 1 for r in rules):
        return ProgramClass.DISJ
    ground = all(r.is_ground() for r in rules)
    if not dependency_graph(rules, ground=ground).is_acyclic():
        return ProgramClass.NORMAL
    if is_nonneg(rules):
        return ProgramClass.NONNEG
    return ProgramClass.TIGHT
