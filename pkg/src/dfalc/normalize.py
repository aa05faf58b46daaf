"""Negation normal form and rewriting of ALC TBoxes into seven normal forms.

A normalized axiom has literal operands (concept names, ``Thing``,
``Nothing``, or their negations) and at most one constructor besides the
inclusion itself:

    1. C ⊑ B              2. C1 ⊓ C2 ⊑ B        3. B ⊑ C1 ⊔ C2
    4. C ⊑ ∃r.B           5. C ⊑ ∀r.B
    6. ∃r.B ⊑ C           7. ∀r.B ⊑ C

Compound subterms are replaced by fresh concept names ``__N<k>``. The same
compound always receives the same name within one normalization, whichever
side of an inclusion it occurs on, so both halves of an equivalence share
their introduced names.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Optional

from .errors import UndefinedFreshName
from .syntax import (
    BOTTOM,
    TOP,
    And,
    Bottom,
    Concept,
    Exists,
    Forall,
    Inclusion,
    Name,
    Not,
    Ontology,
    Or,
    Signature,
    Top,
    concept_names,
    size,
)


def to_nnf(c: Concept) -> Concept:
    """Push negation inwards until it sits only on names (De Morgan, quantifier duality)."""
    return _nnf(c, False)


def _nnf(c: Concept, neg: bool) -> Concept:
    if isinstance(c, Not):
        return _nnf(c.arg, not neg)
    if isinstance(c, Name):
        return Not(c) if neg else c
    if isinstance(c, Top):
        return BOTTOM if neg else TOP
    if isinstance(c, Bottom):
        return TOP if neg else BOTTOM
    if isinstance(c, And):
        cls = Or if neg else And
        return cls(_nnf(c.left, neg), _nnf(c.right, neg))
    if isinstance(c, Or):
        cls = And if neg else Or
        return cls(_nnf(c.left, neg), _nnf(c.right, neg))
    if isinstance(c, Exists):
        cls = Forall if neg else Exists
        return cls(c.role, _nnf(c.filler, neg))
    if isinstance(c, Forall):
        cls = Exists if neg else Forall
        return cls(c.role, _nnf(c.filler, neg))
    raise TypeError(f"not a concept: {c!r}")


def is_literal(c: Concept) -> bool:
    if isinstance(c, Not):
        c = c.arg
    return isinstance(c, (Name, Top, Bottom))


@dataclass(frozen=True)
class Literal:
    """A concept name, ``Thing`` or ``Nothing``, possibly negated."""

    atom: Concept
    negated: bool = False

    @classmethod
    def of(cls, c: Concept) -> "Literal":
        if isinstance(c, Not) and is_literal(c.arg) and not isinstance(c.arg, Not):
            return cls(c.arg, True)
        if isinstance(c, (Name, Top, Bottom)):
            return cls(c, False)
        raise ValueError(f"not a literal: {c!r}")

    @property
    def name(self) -> Optional[str]:
        return self.atom.name if isinstance(self.atom, Name) else None

    @property
    def expr(self) -> Concept:
        return Not(self.atom) if self.negated else self.atom


def classify_form(lhs: Concept, rhs: Concept) -> Optional[int]:
    """Normal form number (1-7) of ``lhs ⊑ rhs``, or ``None`` if it is not normal."""
    lit_l, lit_r = is_literal(lhs), is_literal(rhs)
    if lit_l and lit_r:
        return 1
    if lit_r:
        if isinstance(lhs, And) and is_literal(lhs.left) and is_literal(lhs.right):
            return 2
        if isinstance(lhs, Exists) and is_literal(lhs.filler):
            return 6
        if isinstance(lhs, Forall) and is_literal(lhs.filler):
            return 7
    if lit_l:
        if isinstance(rhs, Or) and is_literal(rhs.left) and is_literal(rhs.right):
            return 3
        if isinstance(rhs, Exists) and is_literal(rhs.filler):
            return 4
        if isinstance(rhs, Forall) and is_literal(rhs.filler):
            return 5
    return None


@dataclass(frozen=True)
class NormalAxiom:
    form: int
    lhs: Concept
    rhs: Concept

    def __post_init__(self):
        if classify_form(self.lhs, self.rhs) != self.form:
            raise ValueError(f"{self.lhs!r} ⊑ {self.rhs!r} is not in form {self.form}")

    @classmethod
    def of(cls, lhs: Concept, rhs: Concept) -> "NormalAxiom":
        form = classify_form(lhs, rhs)
        if form is None:
            raise ValueError("axiom is not in normal form")
        return cls(form, lhs, rhs)

    @property
    def role(self) -> Optional[str]:
        for side in (self.lhs, self.rhs):
            if isinstance(side, (Exists, Forall)):
                return side.role
        return None

    def literals(self) -> tuple[tuple[Literal, ...], tuple[Literal, ...]]:
        """Literal operands of the left and right side, in order."""

        def flat(side):
            if isinstance(side, (And, Or)):
                return (Literal.of(side.left), Literal.of(side.right))
            if isinstance(side, (Exists, Forall)):
                return (Literal.of(side.filler),)
            return (Literal.of(side),)

        return flat(self.lhs), flat(self.rhs)

    def inclusion(self) -> Inclusion:
        return Inclusion(self.lhs, self.rhs)


@dataclass(frozen=True)
class NormalizedTBox:
    axioms: tuple[NormalAxiom, ...]
    fresh_defs: dict[str, Concept] = field(default_factory=dict)
    extended_signature: Signature = field(default_factory=Signature)
    source_signature: Signature = field(default_factory=Signature)

    @property
    def fresh_names(self) -> tuple[str, ...]:
        return tuple(self.fresh_defs)

    def as_ontology(self) -> Ontology:
        return Ontology(tuple(ax.inclusion() for ax in self.axioms), (), self.extended_signature)


class _Normalizer:
    def __init__(self, reserved: set[str]):
        self.reserved = reserved
        self.counter = 0
        self.names: dict[Concept, str] = {}
        self.defs: dict[str, Concept] = {}
        self.done: set[tuple[Concept, str]] = set()
        self.out: dict[NormalAxiom, None] = {}

    def fresh(self, d: Concept, direction: str) -> Name:
        name = self.names.get(d)
        if name is None:
            while True:
                self.counter += 1
                name = f"__N{self.counter}"
                if name not in self.reserved:
                    break
            self.names[d] = name
            self.defs[name] = d
        if (d, direction) not in self.done:
            self.done.add((d, direction))
            if direction == "upper":
                self.norm(d, Name(name))
            else:
                self.norm(Name(name), d)
        return Name(name)

    def norm(self, lhs: Concept, rhs: Concept) -> None:
        form = classify_form(lhs, rhs)
        if form is not None:
            self.out.setdefault(NormalAxiom(form, lhs, rhs))
            return
        if is_literal(rhs):
            if isinstance(lhs, Or):  # NF3
                self.norm(lhs.left, rhs)
                self.norm(lhs.right, rhs)
            elif isinstance(lhs, And):  # NF2
                if not is_literal(lhs.left):
                    self.norm(And(self.fresh(lhs.left, "upper"), lhs.right), rhs)
                else:
                    self.norm(And(lhs.left, self.fresh(lhs.right, "upper")), rhs)
            elif isinstance(lhs, (Exists, Forall)):  # NF4, NF5
                self.norm(type(lhs)(lhs.role, self.fresh(lhs.filler, "upper")), rhs)
            else:
                raise AssertionError(f"unexpected left side {lhs!r}")
        elif is_literal(lhs):
            if isinstance(rhs, And):  # NF6
                self.norm(lhs, rhs.left)
                self.norm(lhs, rhs.right)
            elif isinstance(rhs, Or):  # NF7
                if not is_literal(rhs.right):
                    self.norm(lhs, Or(rhs.left, self.fresh(rhs.right, "lower")))
                else:
                    self.norm(lhs, Or(self.fresh(rhs.left, "lower"), rhs.right))
            elif isinstance(rhs, (Exists, Forall)):  # NF8, NF9
                self.norm(lhs, type(rhs)(rhs.role, self.fresh(rhs.filler, "lower")))
            else:
                raise AssertionError(f"unexpected right side {rhs!r}")
        elif rhs in self.names and lhs not in self.names:  # NF1, reusing the name of the right side
            self.norm(lhs, self.fresh(rhs, "lower"))
        else:  # NF1
            self.norm(self.fresh(lhs, "upper"), rhs)


def normalize(o: Ontology) -> NormalizedTBox:
    sig = o.signature
    reserved = set(sig.concepts) | set(sig.roles) | set(sig.individuals)
    n = _Normalizer(reserved)
    for ax in o.tbox:
        for inc in ax.inclusions():
            n.norm(to_nnf(inc.left), to_nnf(inc.right))
    ext = sig.extend(concepts=tuple(n.defs))
    return NormalizedTBox(tuple(n.out), dict(n.defs), ext, sig)


def input_size(o: Ontology) -> int:
    """Total node count of all TBox expressions (the polynomiality yardstick)."""
    return sum(size(ax.left) + size(ax.right) for ax in o.tbox)


def seed_fresh_assertions(nt: NormalizedTBox, g):
    """Extend grounding ``g`` with membership vectors for the introduced names.

    Each fresh name gets the fuzzy value of its defining expression under
    ``g``. Definitions that mention other fresh names are evaluated after
    them.
    """
    from .grounding import eval_concept

    have = set(g.signature.concepts)
    pending = [n for n in nt.extended_signature.concepts if n not in have]
    for n in pending:
        if n not in nt.fresh_defs:
            raise UndefinedFreshName(f"no definition for introduced name {n!r}")

    sorter = graphlib.TopologicalSorter()
    for n in pending:
        deps = [m for m in concept_names(nt.fresh_defs[n]) if m in nt.fresh_defs and m not in have]
        sorter.add(n, *deps)
    order = list(sorter.static_order())

    current = g
    for n in order:
        current = current.with_concept(n, eval_concept(current, nt.fresh_defs[n]))
    target = g.signature.extend(concepts=nt.extended_signature.concepts, roles=nt.extended_signature.roles)
    return current.reindex(target)
