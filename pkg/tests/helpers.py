"""Random program generators and brute-force oracles shared by the tests.

The oracles deliberately avoid the package's engines: answer sets come from
checking every subset with numpy, world views from trying all 3^n
interpretations against a reduct written out from the definitions.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from elpq.grounder import GroundProgram
from elpq.model import Atom, EpiElement, Literal, Program, Rule, Term

PROP_ATOMS = [Atom(x) for x in "abcdefghijkl"]


# -- generators


def random_plain_rules(rng: random.Random, n_atoms: int, n_rules: int, disjunctive=True):
    atoms = PROP_ATOMS[:n_atoms]
    rules = []
    for _ in range(n_rules):
        hmax = 2 if disjunctive else 1
        head = frozenset(rng.sample(atoms, rng.randint(0, min(hmax, n_atoms))))
        pos = frozenset(rng.sample(atoms, rng.randint(0, min(2, n_atoms))))
        neg = frozenset(rng.sample(atoms, rng.randint(0, min(2, n_atoms))))
        if not head and not pos and not neg:
            head = frozenset({rng.choice(atoms)})
        rules.append(Rule(head, pos, neg))
    return rules


def random_epi_element(rng: random.Random, atoms) -> EpiElement:
    inner = Literal(rng.choice(atoms), rng.random() < 0.6)
    return rng.choice([EpiElement.knot, EpiElement.K, EpiElement.M])(inner)


def random_ground_elp(rng: random.Random, max_atoms=4, max_rules=5, max_epi=3) -> GroundProgram:
    n = rng.randint(1, max_atoms)
    atoms = PROP_ATOMS[:n]
    rules = random_plain_rules(rng, n, rng.randint(1, max_rules))
    budget = rng.randint(0, max_epi)
    for _ in range(budget):
        i = rng.randrange(len(rules))
        r = rules[i]
        rules[i] = Rule(r.head, r.body_pos, r.body_neg, r.body_epi | {random_epi_element(rng, atoms)})
    return GroundProgram.from_rules(rules)


def random_nonneg(rng: random.Random, max_atoms=12, max_rules=14) -> GroundProgram:
    n = rng.randint(1, max_atoms)
    atoms = PROP_ATOMS[:n]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = frozenset(rng.sample(atoms, rng.choice([0, 1, 1, 1, 1])))
        pos = frozenset(rng.sample(atoms, rng.randint(0, min(2, n))))
        epi = frozenset(rng.choice([EpiElement.K, EpiElement.M])(Literal(a))
                        for a in rng.sample(atoms, rng.randint(0, min(2, n))))
        rules.append(Rule(head, pos, frozenset(), epi))
    return GroundProgram.from_rules(rules)


def random_safe_program(rng: random.Random) -> Program:
    """Small non-ground program whose rules are all safe."""
    preds = {f"p{i}": rng.randint(0, 2) for i in range(rng.randint(1, 5))}
    names = list(preds)
    consts = ["1", "2", "c"][: rng.randint(1, 3)]
    variables = ["X", "Y", "Z"]

    def mk(pred, pool):
        return Atom(pred, tuple(Term("variable" if t[0].isupper() else "constant", t)
                                for t in (rng.choice(pool) for _ in range(preds[pred]))))

    rules = []
    for _ in range(rng.randint(1, 5)):
        pos = [mk(rng.choice(names), variables + consts) for _ in range(rng.randint(0, 2))]
        bound = sorted({t.name for a in pos for t in a.args if t.is_variable})
        pool = bound + consts
        head = [mk(rng.choice(names), pool) for _ in range(rng.randint(0, 2))]
        neg = [mk(rng.choice(names), pool) for _ in range(rng.randint(0, 1))]
        epi = [EpiElement.knot(Literal(mk(rng.choice(names), pool), rng.random() < 0.7))
               for _ in range(rng.randint(0, 1))]
        if not (head or pos or neg or epi):
            head = [mk(rng.choice(names), consts)]
        rules.append(Rule(frozenset(head), frozenset(pos), frozenset(neg), frozenset(epi)))
    return Program(tuple(rules))


# -- oracles


def _masks(rules, idx):
    out = []
    for r in rules:
        h = sum(1 << idx[a] for a in r.head)
        p = sum(1 << idx[a] for a in r.body_pos)
        n = sum(1 << idx[a] for a in r.body_neg)
        out.append((h, p, n))
    return out


def brute_answer_sets(rules, atoms) -> set[frozenset]:
    """Answer sets by checking every interpretation and all of its subsets."""
    atoms = sorted(set(atoms), key=Atom.sort_key)
    idx = {a: i for i, a in enumerate(atoms)}
    n = len(atoms)
    allI = np.arange(1 << n, dtype=np.int64)
    ms = _masks(rules, idx)
    is_model = np.ones(1 << n, dtype=bool)
    for h, p, ng in ms:
        is_model &= ((allI & h) != 0) | ((allI & ng) != 0) | ((allI & p) != p)
    found = set()
    for M in np.nonzero(is_model)[0]:
        M = int(M)
        subs = allI[(allI & ~M) == 0]
        ok = np.ones(len(subs), dtype=bool)
        for h, p, ng in ms:
            if ng & M:
                continue
            ok &= ((subs & h) != 0) | ((subs & p) != p)
        if int(ok.sum()) == 1:  # only M itself
            found.add(frozenset(a for a in atoms if M >> idx[a] & 1))
    return found


def oracle_reduct(rules, I: set) -> list[Rule]:
    out = []
    for r in rules:
        pos, neg = set(r.body_pos), set(r.body_neg)
        keep = True
        for e in r.body_epi:
            l = e.inner
            if not e.negated_operator:
                # knot l: "not l" if l in I, otherwise true
                if l in I:
                    if l.positive:
                        neg.add(l.atom)
                    else:
                        pos.add(l.atom)
            else:
                # K l: l if l in I, otherwise false
                if l not in I:
                    keep = False
                    break
                if l.positive:
                    pos.add(l.atom)
                else:
                    neg.add(l.atom)
        if keep:
            out.append(Rule(r.head, frozenset(pos), frozenset(neg)))
    return out


def oracle_world_views(gp: GroundProgram) -> list[frozenset]:
    """All WVIs over at(P) compatible with their own reduct (3^n candidates)."""
    atoms = list(gp.atoms)
    out = []
    for stance in itertools.product((1, -1, 0), repeat=len(atoms)):
        I = {Literal(a, s > 0) for a, s in zip(atoms, stance) if s}
        sets = brute_answer_sets(oracle_reduct(gp.rules, I), atoms)
        if not sets:
            continue
        ok = True
        for a, s in zip(atoms, stance):
            inside = [a in J for J in sets]
            if s > 0 and not all(inside):
                ok = False
            elif s < 0 and any(inside):
                ok = False
            elif s == 0 and (all(inside) or not any(inside)):
                ok = False
            if not ok:
                break
        if ok:
            out.append(frozenset(I))
    return out


def format_wvis(wvis) -> list[tuple[str, ...]]:
    return sorted(tuple(sorted(str(l) for l in w)) for w in wvis)
