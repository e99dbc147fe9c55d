"""World views of ground epistemic programs.

A world-view interpretation (WVI) is a consistent frozenset of ``Literal``.
The epistemic reduct only looks at the WVI's stance on the *inner* literals
(those under ``knot``), so enumeration runs over guesses on inner literals
instead of over all 3^n WVIs: the answer sets of the reduct force a unique
compatible WVI, which is accepted iff it agrees with the guess.

The default strategy walks the guess space depth-first and prunes with an
alternating-fixpoint approximation of the atoms that are true in every / in
some answer set of any completion of the partial guess.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import asp
from .asp import DEFAULT_ATOM_BUDGET, bounds
from .errors import BudgetExceeded, ConstraintViolated, EmptyCollection, WrongFragment
from .grounder import GroundProgram
from .model import Atom, Literal, Rule, is_nonneg

DEFAULT_GUESS_BUDGET = 20

WVI = frozenset  # of Literal
EpistemicGuess = Mapping  # Literal -> bool (True: literal is in the WVI)


@dataclass(frozen=True)
class WorldView:
    wvi: WVI
    witness_count: int
    witnesses: tuple | None = None

    def literals(self) -> list[Literal]:
        return sorted(self.wvi, key=Literal.sort_key)

    def __str__(self):
        return "{" + ", ".join(str(l) for l in self.literals()) + "}"


def wvi_key(wvi: Iterable[Literal]) -> tuple:
    return tuple(sorted(str(l) for l in wvi))


def inner_literals(P: GroundProgram | Iterable[Rule]) -> list[Literal]:
    rules = P.rules if isinstance(P, GroundProgram) else P
    inner = {e.inner for r in rules for e in r.body_epi}
    return sorted(inner, key=Literal.sort_key)


def is_consistent(lits: Iterable[Literal]) -> bool:
    lits = set(lits)
    return not any(-l in lits for l in lits)


# -- reduct and compatibility at the object level


def epistemic_reduct(P: GroundProgram, G: EpistemicGuess) -> GroundProgram:
    """Replace ``knot l`` by ``not l`` (l guessed in) or drop it (guessed out).

    ``K l`` becomes ``l`` when l is guessed in and deletes the rule otherwise.
    ``not -a`` cancels to ``a``; a negative literal ``-a`` in a body means
    ``not a``.
    """
    out = []
    for r in P.rules:
        pos = set(r.body_pos)
        neg = set(r.body_neg)
        deleted = False
        for e in r.body_epi:
            inside = G[e.inner]
            a = e.inner.atom
            if not e.negated_operator:
                if inside:
                    (neg if e.inner.positive else pos).add(a)
            elif inside:
                (pos if e.inner.positive else neg).add(a)
            else:
                deleted = True
                break
        if not deleted:
            out.append(Rule(r.head, frozenset(pos), frozenset(neg)))
    return GroundProgram.from_rules(out, atoms=P.atoms)


def derive_wvi(answer_sets: Iterable[Iterable[Atom]], atoms: Iterable[Atom]) -> WVI:
    """a if a is in every answer set, -a if in none, nothing otherwise."""
    sets = [frozenset(s) for s in answer_sets]
    if not sets:
        raise EmptyCollection("derive_wvi needs at least one answer set")
    inter = frozenset.intersection(*sets)
    union = frozenset.union(*sets)
    out = set()
    for a in atoms:
        if a in inter:
            out.add(Literal(a, True))
        elif a not in union:
            out.add(Literal(a, False))
    return frozenset(out)


def check_compatibility(I: Iterable[Literal], answer_sets: Iterable[Iterable[Atom]], atoms: Iterable[Atom]) -> bool:
    I = set(I)
    sets = [frozenset(s) for s in answer_sets]
    if not sets:
        return False
    if not is_consistent(I):
        return False
    for a in atoms:
        if Literal(a, True) in I:
            if not all(a in J for J in sets):
                return False
        elif Literal(a, False) in I:
            if any(a in J for J in sets):
                return False
        elif not (any(a in J for J in sets) and any(a not in J for J in sets)):
            return False
    return True


# -- compiled engine


class _Compiled:
    def __init__(self, P: GroundProgram):
        idx = P.index
        self.P = P
        self.n = len(P.atoms)
        self.full = (1 << self.n) - 1
        self.inner = inner_literals(P)
        jdx = {l: j for j, l in enumerate(self.inner)}
        self.inner_ids = [(idx[l.atom], l.positive) for l in self.inner]
        self.rules = []
        for r in P.rules:
            h = p = ng = 0
            for a in r.head:
                h |= 1 << idx[a]
            for a in r.body_pos:
                p |= 1 << idx[a]
            for a in r.body_neg:
                ng |= 1 << idx[a]
            epi = tuple((1 << idx[e.inner.atom], e.inner.positive, e.negated_operator, jdx[e.inner])
                        for e in r.body_epi)
            self.rules.append((h, p, ng, epi))
        self.pairs = []
        for j, l in enumerate(self.inner):
            if l.positive and -l in jdx:
                self.pairs.append((j, jdx[-l]))

    def split(self, status):
        """Optimistic and pessimistic plain programs for a partial guess."""
        opt, pes = [], []
        for h, p, ng, epi in self.rules:
            op, on = p, ng
            pp, pn = p, ng
            opt_ok = pes_ok = True
            for bit, positive, negop, j in epi:
                s = status[j]
                if not negop:
                    if s is False:
                        continue
                    # in or undecided: pessimistically require `not l`
                    if positive:
                        pn |= bit
                        if s:
                            on |= bit
                    else:
                        pp |= bit
                        if s:
                            op |= bit
                else:
                    if s is False:
                        opt_ok = pes_ok = False
                        break
                    if s is None:
                        pes_ok = False
                    if positive:
                        op |= bit
                        pp |= bit
                    else:
                        on |= bit
                        pn |= bit
            if opt_ok:
                opt.append((h, op, on))
            if pes_ok:
                pes.append((h, pp, pn))
        return opt, pes

    def reduct(self, status) -> list:
        return self.split(status)[0]

    def leaf(self, status, method: str, atom_budget: int, keep_witnesses: bool):
        rules = self.reduct(status)
        if method == "search":
            stream = asp.solve_masks(self.n, rules)
        else:
            stream = asp.enumerate_masks(self.n, rules, atom_budget)
        # atoms every answer set must contain / avoid under this guess
        must = avoid = 0
        for (a, positive), s in zip(self.inner_ids, status):
            if s:
                if positive:
                    must |= 1 << a
                else:
                    avoid |= 1 << a
        found = []
        inter = self.full
        union = 0
        for m in stream:
            if must & ~m or avoid & m:
                return None
            found.append(m)
            inter &= m
            union |= m
        if not found:
            return None
        for (a, positive), s in zip(self.inner_ids, status):
            bit = 1 << a
            stance = bool(inter & bit) if positive else not union & bit
            if stance != s:
                return None
        P = self.P
        lits = [Literal(P.atoms[a], True) for a in asp._bits(inter)]
        lits += [Literal(P.atoms[a], False) for a in asp._bits(self.full & ~union)]
        wvi = frozenset(lits)
        witnesses = None
        if keep_witnesses:
            witnesses = tuple(sorted((P.atoms_of(m) for m in found), key=lambda s: sorted(map(str, s))))
        return WorldView(wvi, len(found), witnesses)

    def propagate(self, status) -> bool:
        """Tighten a partial guess in place; False if no completion can be accepted."""
        while True:
            opt, pes = self.split(status)
            b = bounds(self.n, opt, pes)
            if b is None:
                return False
            L, U = b
            changed = False
            for j, (a, positive) in enumerate(self.inner_ids):
                bit = 1 << a
                if L & bit:
                    need = positive
                elif not U & bit:
                    need = not positive
                else:
                    continue
                s = status[j]
                if s is None:
                    status[j] = need
                    changed = True
                elif s != need:
                    return False
            for ja, jn in self.pairs:
                sa, sn = status[ja], status[jn]
                if sa and sn:
                    return False
                if sa and sn is None:
                    status[jn] = False
                    changed = True
                elif sn and sa is None:
                    status[ja] = False
                    changed = True
            if not changed:
                return True

    def search(self, status, method, atom_budget, keep_witnesses):
        status = list(status)
        if not self.propagate(status):
            return
        try:
            j = status.index(None)
        except ValueError:
            wv = self.leaf(status, method, atom_budget, keep_witnesses)
            if wv is not None:
                yield tuple(status), wv
            return
        for choice in (True, False):
            status[j] = choice
            yield from self.search(status, method, atom_budget, keep_witnesses)

    def exhaustive(self, prefix, method, atom_budget, keep_witnesses):
        free = len(self.inner) - len(prefix)
        for rest in itertools.product((True, False), repeat=free):
            status = list(prefix) + list(rest)
            if any(status[a] and status[b] for a, b in self.pairs):
                continue
            wv = self.leaf(status, method, atom_budget, keep_witnesses)
            if wv is not None:
                yield tuple(status), wv


def _run_shard(P, prefix, strategy, method, atom_budget, keep_witnesses):
    c = _Compiled(P)
    if strategy == "exhaustive":
        return list(c.exhaustive(prefix, method, atom_budget, keep_witnesses))
    status = list(prefix) + [None] * (len(c.inner) - len(prefix))
    return list(c.search(status, method, atom_budget, keep_witnesses))


def enumerate_world_views(
    P: GroundProgram,
    *,
    strategy: str = "pruned",
    method: str = "search",
    guess_budget: int = DEFAULT_GUESS_BUDGET,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
    keep_witnesses: bool = False,
    jobs: int = 1,
) -> list[WorldView]:
    """All candidate world views of a ground program, in canonical order.

    ``strategy`` is ``"pruned"`` (depth-first with bound propagation) or
    ``"exhaustive"`` (every consistent guess).  ``method`` selects the
    answer-set routine used per guess.
    """
    if strategy not in ("pruned", "exhaustive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    c = _Compiled(P)
    m = len(c.inner)
    if m > guess_budget:
        raise BudgetExceeded("epistemic guess literals", m, guess_budget)

    if jobs > 1 and m > 0:
        k = min(m, max(1, (4 * jobs - 1).bit_length()))
        prefixes = list(itertools.product((True, False), repeat=k))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futures = [ex.submit(_run_shard, P, pre, strategy, method, atom_budget, keep_witnesses)
                       for pre in prefixes]
            results = [pair for f in futures for pair in f.result()]
    else:
        results = _run_shard(P, (), strategy, method, atom_budget, keep_witnesses)

    seen: dict[tuple, WorldView] = {}
    guesses: dict[tuple, tuple] = {}
    for guess, wv in results:
        key = wvi_key(wv.wvi)
        # distinct accepted guesses must give distinct WVIs
        assert key not in guesses or guesses[key] == guess, "guess/world-view bijection violated"
        guesses[key] = guess
        seen[key] = wv
    return [seen[k] for k in sorted(seen)]


def count_world_views(P: GroundProgram, **kwargs) -> int:
    return len(enumerate_world_views(P, **kwargs))


def solve_nonneg(P: GroundProgram, stats: dict | None = None) -> WorldView | None:
    """Polynomial path for negation-free, disjunction-free programs.

    ``K p`` and ``M p`` are read as ``p``; the least model of the resulting
    Horn program fixes the world view, or there is none if a constraint fires.
    """
    if not is_nonneg(P.rules):
        raise WrongFragment("solve_nonneg needs a program with only K a / M a epistemic literals, "
                            "no default negation and no disjunction")
    horn = [Rule(r.head, r.body_pos | {e.inner.atom for e in r.body_epi}) for r in P.rules]
    H = GroundProgram.from_rules(horn, atoms=P.atoms)
    try:
        lm = asp.least_model(H, stats)
    except ConstraintViolated:
        return None
    return WorldView(derive_wvi([lm], P.atoms), 1, (lm,))
