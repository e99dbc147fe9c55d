"""Plausibility levels and probabilities of epistemic queries."""

from __future__ import annotations

import logging
from fractions import Fraction

from .elp import count_world_views
from .errors import ReservedNameError
from .grounder import DEFAULT_GROUND_BUDGET, ground
from .model import Atom, EpiElement, Literal, Program, Query, Rule

log = logging.getLogger(__name__)

QUERY_ATOM_PREFIX = "__q"


def query_union(P: Program, Q: Query) -> Program:
    """Add ``__qi :- knot __qi, not q`` for every query item q.

    ``not K l`` is ``knot l``; ``not M l`` is ``K -l``.  Each item gets its
    own fresh atom ``__q1``, ``__q2``, ... in canonical item order.
    """
    for name in P.predicates():
        if name.startswith(QUERY_ATOM_PREFIX):
            raise ReservedNameError(f"predicate {name!r} collides with the reserved {QUERY_ATOM_PREFIX}* namespace")
    extra = []
    for i, (op, literal) in enumerate(Q.sorted_items(), start=1):
        v = Atom(f"{QUERY_ATOM_PREFIX}{i}")
        negated = EpiElement.knot(literal) if op == "K" else EpiElement.K(-literal)
        extra.append(Rule(frozenset({v}), body_epi=frozenset({EpiElement.knot(Literal(v)), negated})))
    return Program(P.rules + tuple(extra), P.declared_constants)


def plausibility_level(P: Program, Q: Query, *, ground_budget: int = DEFAULT_GROUND_BUDGET, **engine) -> int:
    return count_world_views(ground(query_union(P, Q), ground_budget), **engine)


def probability_parts(P: Program, Q: Query, **kwargs) -> tuple[int, int, Fraction]:
    """(L(P,Q), L(P,∅), probability)."""
    level = plausibility_level(P, Q, **kwargs)
    base = level if not Q.items else plausibility_level(P, Query(), **kwargs)
    prob = Fraction(level, max(1, base))
    if prob > 1:
        # not clamped: the bound L(P,Q) <= L(P,∅) is only an empirical property
        log.warning("probability %s exceeds 1 (L(P,Q)=%d, L(P,{})=%d)", prob, level, base)
    return level, base, prob


def probability(P: Program, Q: Query, **kwargs) -> Fraction:
    return probability_parts(P, Q, **kwargs)[2]
