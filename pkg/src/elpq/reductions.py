"""QBF-style counting instances, their ELP encodings, and a brute-force oracle.

DiffQbf1 counts assignments over X of ``∃Y.φ(X,Y) ∧ ¬∃Z.ψ(X,Z)``; its encoding
is a ground tight program.  DiffQbf3 counts assignments over X of
``∃Y∀Z∃Q.φ ∧ ¬∃U∀V∃W.ψ`` with 3-CNF matrices; its encoding is a non-ground
disjunctive program that saturates over the universal blocks and evaluates
the innermost existential block as a conjunctive query over ``bin/1``.

An empty CNF is true.  Empty clauses are rejected.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import re
from dataclasses import dataclass, fields
from typing import Mapping, Sequence

from .errors import BudgetExceeded, ClauseWidthExceeded, InvalidInstance, VariableOverlap
from .model import Atom, EpiElement, Literal, Program, Rule, Term

ORACLE_BUDGET = 1 << 22

RESERVED_PREFIXES = ("s_", "hat_", "bin", "satphi", "satpsi", "q__")
_VAR_NAME = re.compile(r"[a-z][a-z0-9_]*\Z")

# a clause literal is (variable name, polarity)
Clause = tuple


def _check_names(blocks: Mapping[str, Sequence[str]]):
    seen: dict[str, str] = {}
    for block, names in blocks.items():
        for v in names:
            if not _VAR_NAME.match(v) or v in ("not", "knot", "v"):
                raise InvalidInstance(f"bad variable name {v!r}")
            if v.startswith(RESERVED_PREFIXES):
                raise InvalidInstance(f"variable name {v!r} uses a reserved encoder prefix")
            if v in seen:
                raise VariableOverlap(f"variable {v!r} occurs in blocks {seen[v]} and {block}")
            seen[v] = block


def _check_cnf(cnf, allowed: set[str], name: str, width: int | None = None):
    for c in cnf:
        if not c:
            raise InvalidInstance(f"empty clause in {name}")
        if width is not None and len({v for v, _ in c}) > width:
            raise ClauseWidthExceeded(f"clause {c} in {name} has more than {width} variables")
        for v, _ in c:
            if v not in allowed:
                raise InvalidInstance(f"{name} mentions undeclared or foreign variable {v!r}")


def _normalize_cnf(cnf) -> tuple:
    return tuple(tuple((str(v), bool(p)) for v, p in c) for c in cnf)


@dataclass(frozen=True)
class DiffQbf1:
    X: tuple[str, ...] = ()
    Y: tuple[str, ...] = ()
    Z: tuple[str, ...] = ()
    phi: tuple[Clause, ...] = ()
    psi: tuple[Clause, ...] = ()

    kind = "tight"
    phi_blocks = ("X", "Y")
    psi_blocks = ("X", "Z")

    def __post_init__(self):
        for f in ("X", "Y", "Z"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        object.__setattr__(self, "phi", _normalize_cnf(self.phi))
        object.__setattr__(self, "psi", _normalize_cnf(self.psi))
        _check_names(self.blocks())
        _check_cnf(self.phi, set(self.X) | set(self.Y), "phi")
        _check_cnf(self.psi, set(self.X) | set(self.Z), "psi")

    def blocks(self) -> dict[str, tuple[str, ...]]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("phi", "psi")}

    def num_vars(self) -> int:
        return sum(len(b) for b in self.blocks().values())


@dataclass(frozen=True)
class DiffQbf3:
    X: tuple[str, ...] = ()
    Y: tuple[str, ...] = ()
    Z: tuple[str, ...] = ()
    Q: tuple[str, ...] = ()
    U: tuple[str, ...] = ()
    V: tuple[str, ...] = ()
    W: tuple[str, ...] = ()
    phi: tuple[Clause, ...] = ()
    psi: tuple[Clause, ...] = ()

    kind = "disj3"
    phi_blocks = ("X", "Y", "Z", "Q")
    psi_blocks = ("X", "U", "V", "W")

    def __post_init__(self):
        for f in ("X", "Y", "Z", "Q", "U", "V", "W"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        object.__setattr__(self, "phi", _normalize_cnf(self.phi))
        object.__setattr__(self, "psi", _normalize_cnf(self.psi))
        _check_names(self.blocks())
        _check_cnf(self.phi, set().union(*(getattr(self, b) for b in self.phi_blocks)), "phi", 3)
        _check_cnf(self.psi, set().union(*(getattr(self, b) for b in self.psi_blocks)), "psi", 3)

    def blocks(self) -> dict[str, tuple[str, ...]]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("phi", "psi")}

    def num_vars(self) -> int:
        return sum(len(b) for b in self.blocks().values())


# -- oracle


def _cnf_true(cnf, assignment: Mapping[str, bool]) -> bool:
    return all(any(assignment[v] == p for v, p in c) for c in cnf)


def _quantify(prefix, cnf, assignment: dict) -> bool:
    """Evaluate a quantifier prefix [(kind, vars), ...] over a CNF matrix."""
    if not prefix:
        return _cnf_true(cnf, assignment)
    (kind, names), rest = prefix[0], prefix[1:]
    if not names:
        return _quantify(rest, cnf, assignment)
    v, remaining = names[0], names[1:]
    tail = [(kind, remaining)] + list(rest)
    results = []
    for value in (False, True):
        assignment[v] = value
        results.append(_quantify(tail, cnf, assignment))
        if kind == "E" and results[-1]:
            break
        if kind == "A" and not results[-1]:
            break
    del assignment[v]
    return any(results) if kind == "E" else all(results)


def eval_diff_count(inst: DiffQbf1 | DiffQbf3, budget: int = ORACLE_BUDGET) -> int:
    """Brute-force count of the X-assignments satisfying the instance."""
    if isinstance(inst, DiffQbf1):
        left = [("E", inst.Y)]
        right = [("E", inst.Z)]
    else:
        left = [("E", inst.Y), ("A", inst.Z), ("E", inst.Q)]
        right = [("E", inst.U), ("A", inst.V), ("E", inst.W)]
    inner = (1 << sum(len(b) for _, b in left)) + (1 << sum(len(b) for _, b in right))
    total = (1 << len(inst.X)) * inner
    if total > budget:
        raise BudgetExceeded("oracle assignments", total, budget)
    count = 0
    for values in itertools.product((False, True), repeat=len(inst.X)):
        assignment = dict(zip(inst.X, values))
        if _quantify(left, inst.phi, assignment) and not _quantify(right, inst.psi, assignment):
            count += 1
    return count


# -- encoders


def _a(name: str, *args: Term) -> Atom:
    return Atom(name, tuple(args))


def _hat(v: str) -> Atom:
    return Atom(f"hat_{v}")


def _f(v: str, positive: bool) -> Atom:
    return Atom(v) if positive else _hat(v)


def _epistemic_guess(X) -> list[Rule]:
    out = []
    for x in X:
        out.append(Rule({Atom(x)}, body_epi={EpiElement.knot(Literal(_hat(x)))}))
        out.append(Rule({_hat(x)}, body_epi={EpiElement.knot(Literal(Atom(x)))}))
    return out


def _gate() -> list[Rule]:
    q = Atom("q__")
    return [
        Rule({q}, body_epi={EpiElement.knot(Literal(q)), EpiElement.knot(Literal(Atom("satpsi"), False))}),
        Rule(body_neg={Atom("satphi")}),
    ]


def _dedup(rules: list[Rule]) -> tuple[Rule, ...]:
    return tuple(dict.fromkeys(rules))


def encode_tight(inst: DiffQbf1) -> Program:
    """Ground tight program whose world views correspond to the counted X-assignments."""
    if not isinstance(inst, DiffQbf1):
        raise TypeError("encode_tight needs a DiffQbf1 instance")
    rules = _epistemic_guess(inst.X)
    for a in inst.Y + inst.Z:
        rules.append(Rule({Atom(a)}, body_neg={_hat(a)}))
        rules.append(Rule({_hat(a)}, body_neg={Atom(a)}))
    rules += _gate()
    for tag, cnf in (("phi", inst.phi), ("psi", inst.psi)):
        sats = [Atom(f"s_{tag}_{i}") for i in range(1, len(cnf) + 1)]
        rules.append(Rule({Atom(f"sat{tag}")}, body_pos=set(sats)))
        for s, clause in zip(sats, cnf):
            for v, positive in clause:
                rules.append(Rule({s}, body_pos={_f(v, positive)}))
    return Program(_dedup(rules))


def _fo_var(name: str) -> Term:
    return Term("variable", f"V_{name}")


def encode_disj_nonground(inst: DiffQbf3) -> Program:
    """Non-ground disjunctive program of arity ≤ 3 for a DiffQbf3 instance."""
    if not isinstance(inst, DiffQbf3):
        raise TypeError("encode_disj_nonground needs a DiffQbf3 instance")
    rules = _epistemic_guess(inst.X)
    for a in inst.Y + inst.Z + inst.Q + inst.U + inst.V + inst.W:
        rules.append(Rule({Atom(a), _hat(a)}))
    rules += _gate()
    for block, sat in ((inst.Z, "satphi"), (inst.V, "satpsi")):
        for a in block:
            rules.append(Rule({Atom(a)}, body_pos={Atom(sat)}))
            rules.append(Rule({_hat(a)}, body_pos={Atom(sat)}))
    zero, one = Term("constant", "0"), Term("constant", "1")
    rules.append(Rule({_a("bin", zero)}))
    rules.append(Rule({_a("bin", one)}))
    for tag, cnf, local in (("phi", inst.phi, set(inst.Q)), ("psi", inst.psi, set(inst.W))):
        conj = []
        for i, clause in enumerate(cnf, start=1):
            vec = sorted({v for v, _ in clause if v in local})
            terms = [_fo_var(v) for v in vec]
            guards = {_a("bin", t) for t in terms}
            head = _a(f"s_{tag}_{i}", *terms)
            conj.append(head)
            for v, positive in clause:
                if v in local:
                    j = vec.index(v)
                    pinned = terms[:j] + [one if positive else zero] + terms[j + 1:]
                    rules.append(Rule({_a(f"s_{tag}_{i}", *pinned)}, body_pos=guards))
                else:
                    rules.append(Rule({head}, body_pos=guards | {_f(v, positive)}))
        rules.append(Rule({Atom(f"sat{tag}")}, body_pos=set(conj)))
    return Program(_dedup(rules))


# -- random instances


def random_instance(seed, sizes: Mapping[str, int] | None = None, *, kind: str = "tight",
                    max_vars: int | None = None, max_clauses: int = 3) -> DiffQbf1 | DiffQbf3:
    """Reproducible pseudo-random instance; the same arguments give the same instance."""
    rng = random.Random(seed)
    cls = DiffQbf1 if kind == "tight" else DiffQbf3
    if kind not in ("tight", "disj3"):
        raise ValueError(f"unknown instance kind {kind!r}")
    names = [f.name for f in fields(cls) if f.name not in ("phi", "psi")]
    if sizes is None:
        limit = max_vars if max_vars is not None else (9 if kind == "tight" else 6)
        total = rng.randint(0, limit)
        sizes = dict.fromkeys(names, 0)
        for _ in range(total):
            sizes[rng.choice(names)] += 1
    blocks = {b: tuple(f"{b.lower()}{i}" for i in range(1, sizes.get(b, 0) + 1)) for b in names}
    width = 3

    def cnf(block_names):
        pool = [v for b in block_names for v in blocks[b]]
        if not pool:
            return ()
        out = []
        for _ in range(rng.randint(0, max_clauses)):
            k = rng.randint(1, min(width, len(pool)))
            vs = rng.sample(pool, k)
            out.append(tuple((v, rng.random() < 0.5) for v in vs))
        return tuple(out)

    return cls(**blocks, phi=cnf(cls.phi_blocks), psi=cnf(cls.psi_blocks))


# -- text format


def format_instance(inst: DiffQbf1 | DiffQbf3) -> str:
    blocks = " ".join(f"{b}: {' '.join(vs)} ;".replace("  ", " ") for b, vs in inst.blocks().items())
    lines = [f"blocks {blocks}"]
    for tag, cnf in (("phi", inst.phi), ("psi", inst.psi)):
        lines.append(f"{tag}:")
        for c in cnf:
            lines.append(" ".join(v if p else f"-{v}" for v, p in c))
    return "\n".join(lines) + "\n"


def instance_digest(inst: DiffQbf1 | DiffQbf3) -> str:
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()


def parse_instance(text: str, kind: str | None = None) -> DiffQbf1 | DiffQbf3:
    """Read ``blocks X: .. ; Y: .. ;`` followed by ``phi:`` and ``psi:`` clause sections."""
    blocks: dict[str, list[str]] = {}
    cnfs: dict[str, list] = {"phi": [], "psi": []}
    section = None
    saw_blocks = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("blocks"):
            saw_blocks = True
            for part in line[len("blocks"):].split(";"):
                part = part.strip()
                if not part:
                    continue
                if ":" not in part:
                    raise InvalidInstance(f"line {lineno}: block needs 'Name: vars'")
                name, vs = part.split(":", 1)
                name = name.strip()
                if name in blocks:
                    raise InvalidInstance(f"line {lineno}: block {name} given twice")
                blocks[name] = vs.split()
            continue
        if line.rstrip(":") in cnfs and line.endswith(":"):
            section = line[:-1]
            continue
        if section is None:
            raise InvalidInstance(f"line {lineno}: clause outside a phi:/psi: section")
        clause = []
        for tok in line.replace(",", " ").split():
            positive = not tok.startswith("-")
            clause.append((tok.lstrip("-"), positive))
        cnfs[section].append(tuple(clause))
    if not saw_blocks:
        raise InvalidInstance("missing 'blocks' line")
    if kind is None:
        kind = "disj3" if set(blocks) & {"Q", "U", "V", "W"} else "tight"
    cls = DiffQbf1 if kind == "tight" else DiffQbf3
    allowed = {f.name for f in fields(cls)} - {"phi", "psi"}
    unknown = set(blocks) - allowed
    if unknown:
        raise InvalidInstance(f"blocks {sorted(unknown)} are not valid for a {kind} instance")
    return cls(**{b: tuple(v) for b, v in blocks.items()}, phi=tuple(cnfs["phi"]), psi=tuple(cnfs["psi"]))


def encode(inst: DiffQbf1 | DiffQbf3) -> Program:
    return encode_tight(inst) if isinstance(inst, DiffQbf1) else encode_disj_nonground(inst)
