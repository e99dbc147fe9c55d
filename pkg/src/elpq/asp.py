"""Answer-set semantics for ground, epistemic-free programs.

Interpretations are handled as bitmasks over the atom ids of a
``GroundProgram`` internally; the public functions take and return frozensets
of atoms.  Two enumeration methods exist: ``"search"`` (branching with
clause/support propagation and a stability check per total model) and
``"enumerate"`` (all 2^n candidates, capped by an atom budget).
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import BudgetExceeded, ConstraintViolated, EpistemicPresent
from .grounder import GroundProgram
from .model import Atom, Rule

DEFAULT_ATOM_BUDGET = 24

Interpretation = frozenset  # of Atom

# compiled rule: (head mask, positive body mask, negative body mask)
MaskRule = tuple


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _check_plain(rules: Iterable[Rule]):
    for r in rules:
        if r.body_epi:
            raise EpistemicPresent("rule contains epistemic literals; take the epistemic reduct first")


def compile_rules(gp: GroundProgram) -> list[MaskRule]:
    _check_plain(gp.rules)
    idx = gp.index
    out = []
    for r in gp.rules:
        h = p = ng = 0
        for a in r.head:
            h |= 1 << idx[a]
        for a in r.body_pos:
            p |= 1 << idx[a]
        for a in r.body_neg:
            ng |= 1 << idx[a]
        out.append((h, p, ng))
    return out


def simplify(rules: Iterable[MaskRule]) -> list[MaskRule]:
    """Drop rules satisfied by every interpretation (h∩B+ or B+∩B- non-empty)."""
    return [r for r in rules if not (r[0] & r[1] or r[1] & r[2])]


# -- single-rule / reduct level


def satisfies(M: Iterable[Atom], r: Rule) -> bool:
    """``(H ∪ B-) ∩ M ≠ ∅`` or ``B+ \\ M ≠ ∅``."""
    _check_plain([r])
    M = M if isinstance(M, (set, frozenset)) else set(M)
    return bool((r.head | r.body_neg) & M) or not r.body_pos <= M


def gl_reduct(P: GroundProgram, M: Iterable[Atom]) -> GroundProgram:
    _check_plain(P.rules)
    M = set(M)
    rules = [Rule(r.head, r.body_pos) for r in P.rules if not r.body_neg & M]
    return GroundProgram.from_rules(rules, atoms=P.atoms)


def _least_model_masks(rules, stats: dict | None = None) -> tuple[int, bool]:
    """Naive fixpoint of the one-step consequence operator.

    ``rules`` are ``(head, pos)`` pairs with at most one head bit.  Returns the
    model and whether a constraint fired.
    """
    M = 0
    changed = True
    steps = 0
    violated = False
    while changed and not violated:
        changed = False
        for h, p in rules:
            steps += 1
            if not p & ~M and not h & M:
                if not h:
                    violated = True
                    break
                M |= h
                changed = True
    if stats is not None:
        stats["steps"] = stats.get("steps", 0) + steps
        stats["rules"] = len(rules)
    return M, violated


def least_model(P: GroundProgram, stats: dict | None = None) -> Interpretation:
    """Least model of a positive program with at most one head atom per rule.

    Raises ConstraintViolated if a constraint body becomes true.
    """
    rules = compile_rules(P)
    for h, _, ng in rules:
        if ng:
            raise ValueError("least_model needs a positive program")
        if _popcount(h) > 1:
            raise ValueError("least_model needs a normal program")
    M, violated = _least_model_masks([(h, p) for h, p, _ in rules], stats)
    if violated:
        raise ConstraintViolated("a constraint is violated in the least model")
    return P.atoms_of(M)


def _models(M: int, rules) -> bool:
    for h, p, ng in rules:
        if not (h & M or ng & M or p & ~M):
            return False
    return True


def _reduct_masks(rules, M: int) -> list[tuple[int, int]]:
    return [(h, p) for h, p, ng in rules if not ng & M]


def _has_smaller_model(M: int, reduct) -> bool:
    """Is there a model M' ⊊ M of the positive program ``reduct``?"""
    clauses = []
    for h, p in reduct:
        if p & ~M:
            continue
        clauses.append((h & M, p))
    clauses.append((0, M))
    return _sat(clauses, 0, ~M)


def _sat(clauses, T: int, F: int) -> bool:
    """DPLL over clauses given as (positive mask, negative mask)."""
    while True:
        changed = False
        open_clause = None
        for pos, neg in clauses:
            if pos & T or neg & F:
                continue
            fp = pos & ~F
            fn = neg & ~T
            if not fp and not fn:
                return False
            if not fn and not fp & (fp - 1):
                T |= fp
                changed = True
            elif not fp and not fn & (fn - 1):
                F |= fn
                changed = True
            elif open_clause is None:
                open_clause = fp | fn
        if not changed:
            break
    if open_clause is None:
        return True
    var = open_clause & -open_clause
    return _sat(clauses, T | var, F) or _sat(clauses, T, F | var)


def is_stable(M: int, rules, normal: bool | None = None) -> bool:
    """M is an answer set of the compiled program ``rules``."""
    if not _models(M, rules):
        return False
    reduct = _reduct_masks(rules, M)
    if normal is None:
        normal = all(not h & (h - 1) for h, _ in reduct)
    if normal:
        lm, violated = _least_model_masks(reduct)
        return not violated and lm == M
    return not _has_smaller_model(M, reduct)


def is_answer_set(P: GroundProgram, M: Iterable[Atom]) -> bool:
    rules = compile_rules(P)
    M = set(M)
    unknown = M - set(P.atoms)
    if unknown:
        return False
    return is_stable(P.mask(M), rules)


# -- bounds


def bounds(n: int, optimistic, pessimistic, lower: int = 0) -> tuple[int, int] | None:
    """Alternating fixpoint giving (L, U) with L ⊆ M ⊆ U for every answer set M.

    ``optimistic`` rules are used to over-approximate derivable atoms,
    ``pessimistic`` rules (which must be certainly present) to derive atoms
    true in every answer set.  None signals that no answer set exists.
    """
    full = (1 << n) - 1
    L = lower
    U = full
    while True:
        newU = 0
        changed = True
        while changed:
            changed = False
            for h, p, ng in optimistic:
                if h & ~newU and not p & ~newU and not ng & L:
                    newU |= h
                    changed = True
        if L & ~newU:
            return None
        newL = L
        changed = True
        while changed:
            changed = False
            for h, p, ng in pessimistic:
                if not p & ~newL and not ng & newU:
                    hu = h & newU
                    if not hu:
                        return None
                    if not hu & (hu - 1) and not hu & newL:
                        newL |= hu
                        changed = True
        if newL & ~newU:
            return None
        if newL == L and newU == U:
            return L, U
        L, U = newL, newU


# -- search


class _Solver:
    def __init__(self, n: int, rules):
        self.n = n
        self.rules = simplify(rules)
        self.full = (1 << n) - 1
        self.by_head: list[list[MaskRule]] = [[] for _ in range(n)]
        for r in self.rules:
            for a in _bits(r[0]):
                self.by_head[a].append(r)
        self.normal = all(not h & (h - 1) for h, _, _ in self.rules)

    def propagate(self, T: int, F: int):
        rules = self.rules
        while True:
            changed = False
            for h, p, ng in rules:
                if h & T or p & F or ng & T:
                    continue
                make_true = (h | ng) & ~F
                make_false = p & ~T
                if not make_true:
                    if not make_false:
                        return None
                    if not make_false & (make_false - 1):
                        F |= make_false
                        changed = True
                elif not make_false and not make_true & (make_true - 1):
                    T |= make_true
                    changed = True
            for a in _bits(self.full & ~F):
                bit = 1 << a
                support = None
                count = 0
                for r in self.by_head[a]:
                    h, p, ng = r
                    if p & F or ng & (T | bit) or (h & ~bit) & T:
                        continue
                    count += 1
                    support = r
                    if count > 1:
                        break
                if count == 0:
                    if T & bit:
                        return None
                    F |= bit
                    changed = True
                elif count == 1 and T & bit:
                    h, p, ng = support
                    need_t = p & ~T
                    need_f = (ng | (h & ~bit)) & ~F
                    if need_t or need_f:
                        if need_t & F or need_f & T or need_t & need_f:
                            return None
                        T |= need_t
                        F |= need_f
                        changed = True
            if T & F:
                return None
            if not changed:
                return T, F

    def solve(self, T: int = 0, F: int = 0) -> Iterator[int]:
        stack = [(T, F)]
        while stack:
            T, F = stack.pop()
            res = self.propagate(T, F)
            if res is None:
                continue
            T, F = res
            undecided = self.full & ~(T | F)
            if not undecided:
                if is_stable(T, self.rules, self.normal):
                    yield T
                continue
            bit = undecided & -undecided
            stack.append((T, F | bit))
            stack.append((T | bit, F))


def solve_masks(n: int, rules, T: int = 0, F: int = 0) -> Iterator[int]:
    """Answer sets (as masks) of compiled rules over n atoms, search method."""
    plain = simplify(rules)
    b = bounds(n, plain, plain, T)
    if b is None:
        return
    L, U = b
    if L & F:
        return
    yield from _Solver(n, plain).solve(T | L, F | (((1 << n) - 1) & ~U))


def enumerate_masks(n: int, rules, budget: int = DEFAULT_ATOM_BUDGET) -> Iterator[int]:
    """Answer sets by checking every candidate interpretation.

    Normal programs use the least-model test; disjunctive ones test
    minimality against the subsets of the candidate.
    """
    if n > budget:
        raise BudgetExceeded("answer-set enumeration atoms", n, budget)
    normal = all(not h & (h - 1) for h, _, _ in rules)
    for M in range(1 << n):
        if not _models(M, rules):
            continue
        reduct = _reduct_masks(rules, M)
        if normal:
            lm, violated = _least_model_masks(reduct)
            if not violated and lm == M:
                yield M
            continue
        sub = (M - 1) & M
        minimal = True
        while True:
            if sub != M and all(h & sub or p & ~sub for h, p in reduct):
                minimal = False
                break
            if sub == 0:
                break
            sub = (sub - 1) & M
        if minimal:
            yield M


def answer_set_masks(P: GroundProgram, method: str = "search", budget: int = DEFAULT_ATOM_BUDGET) -> list[int]:
    rules = compile_rules(P)
    n = len(P.atoms)
    if method == "search":
        found = solve_masks(n, rules)
    elif method == "enumerate":
        found = enumerate_masks(n, rules, budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(set(found))


def answer_sets(P: GroundProgram, method: str = "search", budget: int = DEFAULT_ATOM_BUDGET) -> set[Interpretation]:
    return {P.atoms_of(m) for m in answer_set_masks(P, method, budget)}
