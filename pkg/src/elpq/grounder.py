"""Herbrand universe, safety, domain-predicate rewriting and naive grounding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .errors import BudgetExceeded, NonGroundError, ReservedNameError
from .model import Atom, Program, Rule, Term
from .parser import format_rule

RESERVED_CONSTANT = "c0"
DOMAIN_PREDICATE = "dom"
DEFAULT_GROUND_BUDGET = 10**6


def herbrand_universe(program: Program) -> list[str]:
    """Constants of the program (plus declared ones), sorted; ``["c0"]`` if none."""
    consts = {t.name for a in program.atoms() for t in a.args if not t.is_variable}
    if program.declared_constants:
        consts |= set(program.declared_constants)
    if not consts:
        return [RESERVED_CONSTANT]
    return sorted(consts)


def _epi_vars(rule: Rule) -> set[Term]:
    return {t for e in rule.body_epi for t in e.inner.atom.vars}


def check_safety(program: Program, epistemic: bool = True) -> list[Rule]:
    """Rules with ``vars(H ∪ B-) ⊄ vars(B+)``.

    With ``epistemic=True`` variables of epistemic elements must also occur in
    the positive body.
    """
    unsafe = []
    for r in program.rules:
        bound = set().union(*(a.vars for a in r.body_pos)) if r.body_pos else set()
        needed = set()
        for a in itertools.chain(r.head, r.body_neg):
            needed |= a.vars
        if epistemic:
            needed |= _epi_vars(r)
        if not needed <= bound:
            unsafe.append(r)
    return unsafe


def domain_rewrite(program: Program, add_facts: bool = False, epistemic: bool = True) -> Program:
    """Guard every variable of each unsafe rule with ``dom(X)``.

    ``dom(c)`` facts for the Herbrand universe are added when some rule was
    rewritten, or always with ``add_facts=True``.  A program that is already
    safe comes back unchanged unless facts are requested.
    """
    unsafe = set(check_safety(program, epistemic=epistemic))
    if not unsafe and not add_facts:
        return program
    if DOMAIN_PREDICATE in program.predicates():
        raise ReservedNameError(f"predicate {DOMAIN_PREDICATE!r} is reserved for domain rewriting")
    hu = herbrand_universe(program)
    out = [Rule(frozenset({Atom(DOMAIN_PREDICATE, (Term("constant", c),))})) for c in hu]
    for r in program.rules:
        if r in unsafe:
            guards = frozenset(Atom(DOMAIN_PREDICATE, (v,)) for v in r.vars)
            r = Rule(r.head, r.body_pos | guards, r.body_neg, r.body_epi)
        out.append(r)
    return Program(tuple(out), program.declared_constants)


def instantiation_count(program: Program) -> int:
    d = len(herbrand_universe(program))
    return sum(d ** len(r.vars) for r in program.rules)


def rule_key(rule: Rule) -> str:
    return format_rule(rule)


@dataclass(frozen=True)
class GroundProgram:
    """Ground rules in canonical order plus an atom table (atom <-> dense id).

    The table covers ``at(P)``; reducts derived from a program keep the
    parent's table so that interpretations stay comparable.
    """

    rules: tuple[Rule, ...]
    atoms: tuple[Atom, ...]
    index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {a: i for i, a in enumerate(self.atoms)})

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], atoms: Iterable[Atom] | None = None, sort: bool = True):
        rules = list(rules)
        for r in rules:
            if not r.is_ground():
                raise NonGroundError(f"rule {format_rule(r)} is not ground")
        if sort:
            rules = sorted(set(rules), key=rule_key)
        if atoms is None:
            atoms = {a for r in rules for a in r.atoms()}
        return cls(tuple(rules), tuple(sorted(set(atoms), key=Atom.sort_key)))

    def __len__(self):
        return len(self.rules)

    def as_program(self) -> Program:
        return Program(self.rules)

    def mask(self, atoms: Iterable[Atom]) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.index[a]
        return m

    def atoms_of(self, mask: int) -> frozenset[Atom]:
        return frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)


def ground(program: Program, budget: int = DEFAULT_GROUND_BUDGET) -> GroundProgram:
    """All substitutions of rule variables by Herbrand constants, deduplicated."""
    needed = instantiation_count(program)
    if needed > budget:
        raise BudgetExceeded("grounding", needed, budget)
    hu = [Term("constant", c) for c in herbrand_universe(program)]
    out: set[Rule] = set()
    for r in program.rules:
        out.update(ground_rule(r, hu))
    return GroundProgram.from_rules(out)


def ground_rule(rule: Rule, universe: list[Term]) -> Iterable[Rule]:
    vs = sorted(rule.vars)
    if not vs:
        yield rule
        return
    for combo in itertools.product(universe, repeat=len(vs)):
        yield rule.substitute(dict(zip(vs, combo)))

