"""ALC concept terms, axioms, assertions and ontologies.

All types are frozen dataclasses, so structural equality and hashing come for
free and terms can be used as dictionary keys (the normalizer relies on this).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from .errors import DegreeOutOfRange

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Concept:
    """Base class of concept terms; supports ``~c``, ``c & d`` and ``c | d``."""

    __slots__ = ()

    def __invert__(self) -> "Not":
        return Not(self)

    def __and__(self, other: "Concept") -> "And":
        return And(self, other)

    def __or__(self, other: "Concept") -> "Or":
        return Or(self, other)


@dataclass(frozen=True)
class Top(Concept):
    def __str__(self):
        return "Thing"


@dataclass(frozen=True)
class Bottom(Concept):
    def __str__(self):
        return "Nothing"


@dataclass(frozen=True)
class Name(Concept):
    name: str

    def __post_init__(self):
        if not NAME_RE.match(self.name):
            raise ValueError(f"invalid concept name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: str
    filler: Concept


@dataclass(frozen=True)
class Forall(Concept):
    role: str
    filler: Concept


ConceptExpr = Union[Top, Bottom, Name, Not, And, Or, Exists, Forall]

TOP = Top()
BOTTOM = Bottom()


def subterms(c: Concept) -> Iterator[Concept]:
    """Pre-order traversal of ``c``."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (And, Or)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (Exists, Forall)):
            stack.append(node.filler)


def concept_names(c: Concept) -> list[str]:
    """Concept names of ``c`` in first-occurrence order."""
    seen: dict[str, None] = {}
    for node in subterms(c):
        if isinstance(node, Name):
            seen.setdefault(node.name)
    return list(seen)


def role_names(c: Concept) -> list[str]:
    seen: dict[str, None] = {}
    for node in subterms(c):
        if isinstance(node, (Exists, Forall)):
            seen.setdefault(node.role)
    return list(seen)


def size(c: Concept) -> int:
    """Number of nodes in the term tree."""
    return sum(1 for _ in subterms(c))


def depth(c: Concept) -> int:
    if isinstance(c, Not):
        return 1 + depth(c.arg)
    if isinstance(c, (And, Or)):
        return 1 + max(depth(c.left), depth(c.right))
    if isinstance(c, (Exists, Forall)):
        return 1 + depth(c.filler)
    return 0


# -- axioms and assertions ---------------------------------------------------


@dataclass(frozen=True)
class Inclusion:
    left: Concept
    right: Concept

    def inclusions(self) -> tuple["Inclusion", ...]:
        return (self,)


@dataclass(frozen=True)
class Equivalence:
    left: Concept
    right: Concept

    def inclusions(self) -> tuple[Inclusion, ...]:
        return (Inclusion(self.left, self.right), Inclusion(self.right, self.left))


TBoxAxiom = Union[Inclusion, Equivalence]


@dataclass(frozen=True)
class ConceptAssertion:
    individual: str
    concept: Concept
    degree: float = 1.0

    def __post_init__(self):
        _check_degree(self.degree)


@dataclass(frozen=True)
class RoleAssertion:
    subject: str
    object: str
    role: str
    degree: float = 1.0

    def __post_init__(self):
        _check_degree(self.degree)


def _check_degree(n: float) -> None:
    if not 0.0 <= n <= 1.0:
        raise DegreeOutOfRange(f"assertion degree {n} outside [0, 1]")


ABoxAssertion = Union[ConceptAssertion, RoleAssertion]


# -- signature and ontology --------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Ordered concept, role and individual names.

    The order is the indexing contract: concept ``i`` is row ``i`` of a
    grounding's concept table, individual ``j`` is column ``j``.
    """

    concepts: tuple[str, ...] = ()
    roles: tuple[str, ...] = ()
    individuals: tuple[str, ...] = ()

    def __post_init__(self):
        for attr in ("concepts", "roles", "individuals"):
            names = getattr(self, attr)
            if not isinstance(names, tuple):
                object.__setattr__(self, attr, tuple(names))
            if len(set(getattr(self, attr))) != len(getattr(self, attr)):
                raise ValueError(f"duplicate names in signature {attr}")
        c, r, i = set(self.concepts), set(self.roles), set(self.individuals)
        clash = (c & r) | (c & i) | (r & i)
        if clash:
            raise ValueError(f"names used in more than one sort: {sorted(clash)}")

    @cached_property
    def concept_index(self) -> dict[str, int]:
        return {n: k for k, n in enumerate(self.concepts)}

    @cached_property
    def role_index(self) -> dict[str, int]:
        return {n: k for k, n in enumerate(self.roles)}

    @cached_property
    def individual_index(self) -> dict[str, int]:
        return {n: k for k, n in enumerate(self.individuals)}

    def extend(self, concepts=(), roles=(), individuals=()) -> "Signature":
        """Append names not already present, keeping the existing order."""

        def merge(old, new):
            out = list(old)
            for n in new:
                if n not in out:
                    out.append(n)
            return tuple(out)

        return Signature(
            merge(self.concepts, concepts),
            merge(self.roles, roles),
            merge(self.individuals, individuals),
        )

    def issubset(self, other: "Signature") -> bool:
        return (
            set(self.concepts) <= set(other.concepts)
            and set(self.roles) <= set(other.roles)
            and set(self.individuals) <= set(other.individuals)
        )


@dataclass(frozen=True)
class Ontology:
    tbox: tuple[TBoxAxiom, ...] = ()
    abox: tuple[ABoxAssertion, ...] = ()
    signature: Signature = field(default_factory=Signature)

    def __post_init__(self):
        object.__setattr__(self, "tbox", tuple(self.tbox))
        object.__setattr__(self, "abox", tuple(self.abox))
        missing = scan_signature(self.tbox, self.abox)
        if not missing.issubset(self.signature):
            # names referenced but not declared are registered by first use
            object.__setattr__(
                self,
                "signature",
                self.signature.extend(missing.concepts, missing.roles, missing.individuals),
            )


def scan_signature(tbox, abox) -> Signature:
    """Collect every name referenced by ``tbox`` and ``abox`` in first-use order."""
    concepts: dict[str, None] = {}
    roles: dict[str, None] = {}
    individuals: dict[str, None] = {}

    def visit(c: Concept):
        for n in concept_names(c):
            concepts.setdefault(n)
        for r in role_names(c):
            roles.setdefault(r)

    for ax in tbox:
        visit(ax.left)
        visit(ax.right)
    for a in abox:
        if isinstance(a, ConceptAssertion):
            individuals.setdefault(a.individual)
            visit(a.concept)
        else:
            individuals.setdefault(a.subject)
            individuals.setdefault(a.object)
            roles.setdefault(a.role)
    return Signature(tuple(concepts), tuple(roles), tuple(individuals))


def signature_of(o: Ontology) -> Signature:
    """Stable-ordered signature of ``o``: declared names first, then first use."""
    return o.signature
