"""Line-oriented text format for ALC ontologies with fuzzy assertions.

One statement per line, ``#`` starts a comment::

    concept Cat
    role isPartOf
    individual s1
    axiom (some isPartOf . Chair) EquivalentTo (Seat or Leg)
    axiom (Chair and Table) SubClassOf Nothing
    assert Cat(s1) = 0.9
    assert isPartOf(s2, s1)

Concept expressions bind ``not`` tighter than ``and`` tighter than ``or``;
the filler of ``some r .`` / ``only r .`` extends to the next closing
parenthesis or the end of the line.
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import DegreeOutOfRange, DuplicateDeclarationKind, OntologySyntaxError
from .syntax import (
    BOTTOM,
    TOP,
    And,
    Bottom,
    Concept,
    ConceptAssertion,
    Equivalence,
    Exists,
    Forall,
    Inclusion,
    Name,
    Not,
    Ontology,
    Or,
    RoleAssertion,
    Signature,
    Top,
    concept_names,
    role_names,
)

KEYWORDS = frozenset(
    "concept role individual axiom assert SubClassOf EquivalentTo "
    "Thing Nothing not and or some only".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<cmp>>=|<=|>|<)
  | (?P<sym>[().,=])
    """,
    re.VERBOSE,
)

_SORTS = ("concept", "role", "individual")


class _Tok:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind, text, col):
        self.kind = kind
        self.text = text
        self.col = col


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise OntologySyntaxError(lineno, pos + 1, "a token", line[pos])
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind == "name" and text in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, text, pos + 1))
        pos = m.end()
    toks.append(_Tok("eol", "", len(line) + 1))
    return toks


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str):
        t = self.tok
        raise OntologySyntaxError(self.lineno, t.col, expected, t.text or "end of line")

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def take(self, kind: str, text: str | None = None, expected: str | None = None) -> _Tok:
        if not self.at(kind, text):
            self.fail(expected or repr(text) if text else (expected or kind))
        t = self.tok
        self.i += 1
        return t

    def name(self, what: str) -> str:
        return self.take("name", expected=what).text

    def end(self):
        if not self.at("eol"):
            self.fail("end of line")

    # concept expressions

    def expr(self) -> Concept:
        left = self.conj()
        while self.at("kw", "or"):
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Concept:
        left = self.unary()
        while self.at("kw", "and"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Concept:
        t = self.tok
        if t.kind == "kw":
            if t.text == "not":
                self.i += 1
                return Not(self.unary())
            if t.text in ("some", "only"):
                self.i += 1
                role = self.name("a role name")
                self.take("sym", ".", "'.' after the role name")
                filler = self.expr()
                return Exists(role, filler) if t.text == "some" else Forall(role, filler)
            if t.text == "Thing":
                self.i += 1
                return TOP
            if t.text == "Nothing":
                self.i += 1
                return BOTTOM
            self.fail("a concept expression")
        if t.kind == "name":
            self.i += 1
            return Name(t.text)
        if self.at("sym", "("):
            self.i += 1
            inner = self.expr()
            self.take("sym", ")", "')'")
            return inner
        self.fail("a concept expression")

    def degree(self) -> float:
        if self.at("cmp"):
            t = self.tok
            raise OntologySyntaxError(
                self.lineno, t.col, "'=' (only equality assertions are supported)", t.text
            )
        if not self.at("sym", "="):
            return 1.0
        self.i += 1
        t = self.take("number", expected="a degree in [0, 1]")
        value = float(t.text)
        if not 0.0 <= value <= 1.0:
            raise DegreeOutOfRange(f"line {self.lineno}, col {t.col}: degree {t.text} outside [0, 1]")
        return value


class _Collector:
    """Tracks the sort of every name and its first-seen order."""

    def __init__(self):
        self.sort: dict[str, str] = {}
        self.order: dict[str, list[str]] = {s: [] for s in _SORTS}

    def add(self, name: str, sort: str, lineno: int):
        prev = self.sort.get(name)
        if prev is None:
            self.sort[name] = sort
            self.order[sort].append(name)
        elif prev != sort:
            raise DuplicateDeclarationKind(
                f"line {lineno}: {name!r} used as {sort} but already a {prev}"
            )

    def add_concept(self, c: Concept, lineno: int):
        for n in concept_names(c):
            self.add(n, "concept", lineno)
        for r in role_names(c):
            self.add(r, "role", lineno)

    def signature(self) -> Signature:
        return Signature(*(tuple(self.order[s]) for s in _SORTS))


def parse_concept(text: str) -> Concept:
    """Parse a single concept expression, e.g. ``"A and some r . B"``."""
    p = _LineParser(_tokenize(text, 1), 1)
    c = p.expr()
    p.end()
    return c


def parse_ontology(text: str) -> Ontology:
    tbox = []
    abox = []
    names = _Collector()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        p = _LineParser(_tokenize(line, lineno), lineno)
        head = p.take("kw", expected="a statement keyword")
        if head.text in _SORTS:
            names.add(p.name(f"a {head.text} name"), head.text, lineno)
            p.end()
        elif head.text == "axiom":
            left = p.expr()
            if p.at("kw", "SubClassOf"):
                cls = Inclusion
            elif p.at("kw", "EquivalentTo"):
                cls = Equivalence
            else:
                p.fail("'SubClassOf' or 'EquivalentTo'")
            p.i += 1
            right = p.expr()
            p.end()
            names.add_concept(left, lineno)
            names.add_concept(right, lineno)
            tbox.append(cls(left, right))
        elif head.text == "assert":
            abox.append(_parse_assertion(p, names, lineno))
        else:
            p.i -= 1
            p.fail("'concept', 'role', 'individual', 'axiom' or 'assert'")
    return Ontology(tuple(tbox), tuple(abox), names.signature())


def _parse_assertion(p: _LineParser, names: _Collector, lineno: int):
    if p.at("sym", "("):
        p.i += 1
        concept = p.expr()
        p.take("sym", ")", "')'")
        head = None
    else:
        head = p.name("a concept or role name")
    p.take("sym", "(", "'('")
    first = p.name("an individual name")
    second = None
    if p.at("sym", ","):
        p.i += 1
        second = p.name("an individual name")
    p.take("sym", ")", "')'")
    degree = p.degree()
    p.end()
    if second is not None:
        if head is None:
            p.fail("a role name before a pair of individuals")
        names.add(head, "role", lineno)
        names.add(first, "individual", lineno)
        names.add(second, "individual", lineno)
        return RoleAssertion(first, second, head, degree)
    if head is not None:
        concept = Name(head)
    names.add_concept(concept, lineno)
    names.add(first, "individual", lineno)
    return ConceptAssertion(first, concept, degree)


# -- rendering ---------------------------------------------------------------

_OR, _AND, _UNARY = 1, 2, 3


def render_concept(c: Concept, level: int = 0) -> str:
    """Render with the fewest parentheses that re-parse to the same tree."""
    if isinstance(c, Top):
        return "Thing"
    if isinstance(c, Bottom):
        return "Nothing"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Not):
        return "not " + render_concept(c.arg, _UNARY)
    if isinstance(c, (Exists, Forall)):
        kw = "some" if isinstance(c, Exists) else "only"
        text = f"{kw} {c.role} . {render_concept(c.filler)}"
        return f"({text})" if level > 0 else text
    if isinstance(c, And):
        text = f"{render_concept(c.left, _AND)} and {render_concept(c.right, _UNARY)}"
        return f"({text})" if level > _AND else text
    if isinstance(c, Or):
        text = f"{render_concept(c.left, _OR)} or {render_concept(c.right, _AND)}"
        return f"({text})" if level > _OR else text
    raise TypeError(f"not a concept: {c!r}")


def _side(c: Concept) -> str:
    text = render_concept(c)
    if isinstance(c, (Top, Bottom, Name)):
        return text
    return f"({text})"


def render_axiom(ax) -> str:
    op = "SubClassOf" if isinstance(ax, Inclusion) else "EquivalentTo"
    return f"axiom {_side(ax.left)} {op} {_side(ax.right)}"


def render_assertion(a) -> str:
    if isinstance(a, RoleAssertion):
        text = f"assert {a.role}({a.subject}, {a.object})"
    else:
        text = f"assert {_side(a.concept)}({a.individual})"
    if a.degree != 1.0:
        text += f" = {float(a.degree)!r}"
    return text


def render_ontology(o: Ontology, extra_lines: Iterable[str] = ()) -> str:
    sig = o.signature
    lines = [f"concept {n}" for n in sig.concepts]
    lines += [f"role {n}" for n in sig.roles]
    lines += [f"individual {n}" for n in sig.individuals]
    lines += [render_axiom(ax) for ax in o.tbox]
    lines += [render_assertion(a) for a in o.abox]
    lines += list(extra_lines)
    return "\n".join(lines) + "\n"
