"""Text frontend and serializer for the ELP surface language.

Grammar::

    program  := (rule ".")*
    rule     := headlist? (":-" body)?
    headlist := atom ("v" atom)*
    body     := elem ("," elem)*
    elem     := atom | "not" atom | "knot" lit | "K" lit | "M" lit
    lit      := atom | "-" atom
    atom     := ident ("(" term ("," term)* ")")?

``%`` starts a comment running to the end of the line.  ``:- .`` is accepted
as the empty constraint (always violated) and is also how it is printed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    ArityMismatchError,
    ClassicalNegationOutsideEpistemicError,
    ElpSyntaxError,
)
from .model import Atom, EpiElement, Literal, Program, Query, Rule, Term

KEYWORDS = frozenset({"not", "knot"})


@dataclass(frozen=True)
class SourceSpan:
    start: int  # byte offsets into the UTF-8 encoding
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<if>:-)
  | (?P<punct>[.,()\-])
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>_*[a-z][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
  | (?P<str>"[^"\\\n]*")
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str  # if, punct, var, ident, num, str, eof
    value: str
    pos: int
    end: int


def _span(text: str, pos: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    start_b = len(text[:pos].encode("utf-8", "surrogatepass"))
    end_b = start_b + len(text[pos:end].encode("utf-8", "surrogatepass"))
    return SourceSpan(start_b, end_b, line, col)


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ElpSyntaxError(f"unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos, m.end()))
        pos = m.end()
    toks.append(_Tok("eof", "", n, n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.arities: dict[str, int] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def span(self, tok: _Tok | None = None) -> SourceSpan:
        tok = tok or self.tok
        return _span(self.text, tok.pos, tok.end)

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        found = tok.value or "end of input"
        raise ElpSyntaxError(f"{msg}, found {found!r}", self.span(tok))

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, value: str) -> _Tok:
        if self.tok.value != value or self.tok.kind not in ("punct", "if"):
            self.fail(f"expected {value!r}")
        return self.advance()

    def is_punct(self, value: str) -> bool:
        return self.tok.kind in ("punct", "if") and self.tok.value == value

    # -- pieces

    def term(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.advance()
            return Term("variable", t.value)
        if t.kind in ("ident", "num", "str"):
            self.advance()
            return Term("constant", t.value)
        self.fail("expected a term")

    def atom(self) -> Atom:
        t = self.tok
        if self.is_punct("-"):
            raise ClassicalNegationOutsideEpistemicError(
                "classical negation is only allowed after K, M or knot", self.span()
            )
        if t.kind != "ident" or t.value in KEYWORDS:
            self.fail("expected an atom")
        self.advance()
        args: list[Term] = []
        if self.is_punct("("):
            self.advance()
            args.append(self.term())
            while self.is_punct(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
        a = Atom(t.value, tuple(args))
        known = self.arities.setdefault(a.predicate, a.arity)
        if known != a.arity:
            raise ArityMismatchError(
                f"predicate {a.predicate} used with arity {a.arity} and {known}", self.span(t)
            )
        return a

    def literal(self) -> Literal:
        if self.is_punct("-"):
            self.advance()
            return Literal(self.atom(), False)
        return Literal(self.atom(), True)

    def epistemic_prefix(self) -> str | None:
        t = self.tok
        if t.kind == "ident" and t.value == "knot":
            return "knot"
        if t.kind == "var" and t.value in ("K", "M"):
            nxt = self.peek()
            if nxt.kind == "ident" or (nxt.kind == "punct" and nxt.value == "-"):
                return t.value
        return None

    def epi(self, op: str) -> EpiElement:
        inner = self.literal()
        if op == "K":
            return EpiElement.K(inner)
        if op == "M":
            return EpiElement.M(inner)
        return EpiElement.knot(inner)

    def body(self, pos: set, neg: set, epi: set):
        while True:
            t = self.tok
            op = self.epistemic_prefix()
            if op is not None:
                self.advance()
                epi.add(self.epi(op))
            elif t.kind == "ident" and t.value == "not":
                self.advance()
                neg.add(self.atom())
            else:
                pos.add(self.atom())
            if not self.is_punct(","):
                return
            self.advance()

    def rule(self) -> Rule:
        head: set[Atom] = set()
        pos: set[Atom] = set()
        neg: set[Atom] = set()
        epi: set[EpiElement] = set()
        if not self.is_punct(":-") and not self.is_punct("."):
            head.add(self.atom())
            while self.tok.kind == "ident" and self.tok.value == "v":
                self.advance()
                head.add(self.atom())
        if self.is_punct(":-"):
            self.advance()
            if not self.is_punct("."):
                self.body(pos, neg, epi)
        self.expect(".")
        return Rule(frozenset(head), frozenset(pos), frozenset(neg), frozenset(epi))

    def program(self) -> Program:
        rules = []
        while self.tok.kind != "eof":
            rules.append(self.rule())
        return Program(tuple(rules))

    def query(self) -> Query:
        items = []
        if self.tok.kind == "eof":
            return Query(frozenset())
        while True:
            t = self.tok
            if t.kind != "var" or t.value not in ("K", "M"):
                self.fail("expected K or M")
            self.advance()
            items.append((t.value, self.literal()))
            if self.tok.kind == "eof":
                break
            self.expect(",")
        return Query(frozenset(items))


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            span = SourceSpan(exc.start, exc.end, text.count(b"\n", 0, exc.start) + 1,
                              exc.start - (text.rfind(b"\n", 0, exc.start) + 1) + 1)
            raise ElpSyntaxError("input is not valid UTF-8", span) from None
    return text


def parse_program(text: str | bytes) -> Program:
    return _Parser(_decode(text)).program()


def parse_query(text: str | bytes) -> Query:
    return _Parser(_decode(text)).query()


# -- serialization


def format_atom(a: Atom) -> str:
    return str(a)


def format_rule(r: Rule) -> str:
    head = " v ".join(str(a) for a in sorted(r.head, key=Atom.sort_key))
    body = [str(a) for a in sorted(r.body_pos, key=Atom.sort_key)]
    body += [f"not {a}" for a in sorted(r.body_neg, key=Atom.sort_key)]
    body += [str(e) for e in sorted(r.body_epi, key=EpiElement.sort_key)]
    if not body:
        return f"{head}." if head else ":- ."
    if head:
        return f"{head} :- {', '.join(body)}."
    return f":- {', '.join(body)}."


def serialize_rules(rules: Iterable[Rule]) -> str:
    lines = [format_rule(r) for r in rules]
    return "".join(line + "\n" for line in lines)


def serialize_program(program: Program) -> str:
    return serialize_rules(program.rules)


def serialize_query(query: Query) -> str:
    return str(query)
