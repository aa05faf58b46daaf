"""Fuzzy interpretations over a finite individual domain and Gödel semantics.

A :class:`Grounding` stores one membership vector per concept name (a row of
``concepts``, shape ``(n_concepts, n_individuals)``) and one membership
matrix per role name (``roles``, shape ``(n_roles, n, n)``, entry
``[k, i, j]`` is the degree of ``(individual_i, individual_j) : role_k``).
"""

from __future__ import annotations

import json
from os import PathLike
from typing import Callable, Iterator, Mapping

import numpy as np

from .errors import EmptyTBox, GroundingFormatError, ShapeMismatch, UnknownName
from .syntax import (
    And,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    Name,
    Not,
    Ontology,
    Or,
    RoleAssertion,
    Signature,
    Top,
)


class Grounding:
    __slots__ = ("signature", "concepts", "roles")

    def __init__(self, signature: Signature, concepts=None, roles=None, *, check: bool = True):
        n = len(signature.individuals)
        if concepts is None:
            concepts = np.zeros((len(signature.concepts), n))
        if roles is None:
            roles = np.zeros((len(signature.roles), n, n))
        concepts = np.array(concepts, dtype=float).reshape(len(signature.concepts), n)
        roles = np.array(roles, dtype=float).reshape(len(signature.roles), n, n)
        if check:
            for label, arr in (("concept", concepts), ("role", roles)):
                if arr.size and not (np.all(np.isfinite(arr)) and arr.min() >= 0.0 and arr.max() <= 1.0):
                    raise GroundingFormatError(f"{label} degrees must lie in [0, 1]")
        concepts.flags.writeable = False
        roles.flags.writeable = False
        self.signature = signature
        self.concepts = concepts
        self.roles = roles

    @property
    def n_individuals(self) -> int:
        return len(self.signature.individuals)

    def concept(self, name: str) -> np.ndarray:
        try:
            return self.concepts[self.signature.concept_index[name]]
        except KeyError:
            raise UnknownName(f"concept {name!r} is not in the grounding") from None

    def role(self, name: str) -> np.ndarray:
        try:
            return self.roles[self.signature.role_index[name]]
        except KeyError:
            raise UnknownName(f"role {name!r} is not in the grounding") from None

    def concept_items(self) -> Iterator[tuple[str, np.ndarray]]:
        return zip(self.signature.concepts, self.concepts)

    def role_items(self) -> Iterator[tuple[str, np.ndarray]]:
        return zip(self.signature.roles, self.roles)

    def replace(self, concepts=None, roles=None, *, check: bool = True) -> "Grounding":
        return Grounding(
            self.signature,
            self.concepts if concepts is None else concepts,
            self.roles if roles is None else roles,
            check=check,
        )

    def with_concept(self, name: str, values) -> "Grounding":
        """Copy with ``name`` set to ``values`` (appended if it is a new name)."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_individuals,):
            raise ShapeMismatch(f"expected {self.n_individuals} values for {name!r}, got {values.shape}")
        if name in self.signature.concept_index:
            concepts = self.concepts.copy()
            concepts[self.signature.concept_index[name]] = values
            return Grounding(self.signature, concepts, self.roles)
        sig = self.signature.extend(concepts=(name,))
        return Grounding(sig, np.vstack([self.concepts, values[None, :]]), self.roles)

    def reindex(self, signature: Signature) -> "Grounding":
        """Reorder (or restrict) to ``signature``; every name must be present."""
        own = self.signature
        try:
            ci = [own.concept_index[c] for c in signature.concepts]
            ri = [own.role_index[r] for r in signature.roles]
            ii = [own.individual_index[i] for i in signature.individuals]
        except KeyError as e:
            raise UnknownName(f"{e.args[0]!r} is not in the grounding") from None
        n = len(ii)
        concepts = self.concepts[np.ix_(ci, ii)] if ci else np.zeros((0, n))
        roles = self.roles[np.ix_(ri, ii, ii)] if ri else np.zeros((0, n, n))
        return Grounding(signature, concepts, roles, check=False)

    def allclose(self, other: "Grounding", atol: float = 0.0) -> bool:
        return (
            self.signature == other.signature
            and np.allclose(self.concepts, other.concepts, rtol=0.0, atol=atol)
            and np.allclose(self.roles, other.roles, rtol=0.0, atol=atol)
        )

    def __repr__(self):
        s = self.signature
        return f"Grounding({len(s.concepts)} concepts, {len(s.roles)} roles, {len(s.individuals)} individuals)"

    # -- construction helpers

    @classmethod
    def from_tables(
        cls,
        individuals,
        concepts: Mapping[str, object] = (),
        roles: Mapping[str, object] = (),
    ) -> "Grounding":
        concepts = dict(concepts)
        roles = dict(roles)
        sig = Signature(tuple(concepts), tuple(roles), tuple(individuals))
        n = len(sig.individuals)
        c = np.array([np.asarray(v, dtype=float) for v in concepts.values()]).reshape(len(concepts), n)
        r = np.array([np.asarray(v, dtype=float) for v in roles.values()]).reshape(len(roles), n, n)
        return cls(sig, c, r)

    @classmethod
    def from_abox(cls, o: Ontology, fill: float = 0.0) -> "Grounding":
        """Grounding whose entries are the atomic ABox degrees, ``fill`` elsewhere.

        Assertions about compound concepts are ignored.
        """
        sig = o.signature
        n = len(sig.individuals)
        c = np.full((len(sig.concepts), n), fill)
        r = np.full((len(sig.roles), n, n), fill)
        for a in o.abox:
            if isinstance(a, ConceptAssertion) and isinstance(a.concept, Name):
                c[sig.concept_index[a.concept.name], sig.individual_index[a.individual]] = a.degree
            elif isinstance(a, RoleAssertion):
                i, j = sig.individual_index[a.subject], sig.individual_index[a.object]
                r[sig.role_index[a.role], i, j] = a.degree
        return cls(sig, c, r)

    # -- JSON

    def to_dict(self) -> dict:
        return {
            "individuals": list(self.signature.individuals),
            "concepts": {n: [float(x) for x in v] for n, v in self.concept_items()},
            "roles": {n: [[float(x) for x in row] for row in m] for n, m in self.role_items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Grounding":
        try:
            individuals = list(data["individuals"])
            concepts = dict(data.get("concepts", {}))
            roles = dict(data.get("roles", {}))
        except (KeyError, TypeError, ValueError) as e:
            raise GroundingFormatError(f"malformed grounding: {e}") from None
        n = len(individuals)
        for name, v in concepts.items():
            if np.shape(v) != (n,):
                raise GroundingFormatError(f"concept {name!r}: expected {n} values, got shape {np.shape(v)}")
        for name, m in roles.items():
            if np.shape(m) != (n, n):
                raise GroundingFormatError(f"role {name!r}: expected a {n}x{n} matrix, got shape {np.shape(m)}")
        try:
            return cls.from_tables(individuals, concepts, roles)
        except ValueError as e:
            raise GroundingFormatError(str(e)) from None

    def dumps(self) -> str:
        # float repr is the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text: str) -> "Grounding":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise GroundingFormatError(f"invalid JSON: {e}") from None
        return cls.from_dict(data)

    def save(self, path: str | PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path: str | PathLike) -> "Grounding":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


# -- Gödel semantics -----------------------------------------------------------


def evaluate(
    c: Concept,
    concept_of: Callable[[str], np.ndarray],
    role_of: Callable[[str], np.ndarray],
    top,
    shape: tuple[int, ...],
) -> np.ndarray:
    """Evaluate ``c`` with min/max connectives and ``top - x`` negation.

    ``concept_of`` returns arrays of ``shape`` (leading batch axes, then the
    individual axis); ``role_of`` returns arrays with one more trailing
    individual axis. With ``top=1.0`` this is Gödel fuzzy semantics; with
    integers and ``top=2`` it is strong-Kleene logic over {0, 1, 2}.
    """

    def ev(c):
        if isinstance(c, Name):
            return concept_of(c.name)
        if isinstance(c, Top):
            return np.full(shape, top)
        if isinstance(c, Bottom):
            return np.zeros(shape, dtype=np.asarray(top).dtype)
        if isinstance(c, Not):
            return top - ev(c.arg)
        if isinstance(c, And):
            return np.minimum(ev(c.left), ev(c.right))
        if isinstance(c, Or):
            return np.maximum(ev(c.left), ev(c.right))
        if isinstance(c, Exists):
            pairs = np.minimum(role_of(c.role), ev(c.filler)[..., None, :])
            return pairs.max(axis=-1, initial=0)
        if isinstance(c, Forall):
            pairs = np.maximum(top - role_of(c.role), ev(c.filler)[..., None, :])
            return pairs.min(axis=-1, initial=top)
        raise TypeError(f"not a concept: {c!r}")

    return ev(c)


def eval_concept(g: Grounding, c: Concept) -> np.ndarray:
    """Membership degree of every individual in ``c`` (sup/inf taken over the finite domain)."""
    return evaluate(c, g.concept, g.role, 1.0, (g.n_individuals,))


def fuzzy_inclusion_check(g: Grounding, lhs: Concept, rhs: Concept) -> tuple[bool, np.ndarray]:
    """Whether ``lhs ⊑ rhs`` holds pointwise in ``g``, and the per-individual violation."""
    violation = np.maximum(0.0, eval_concept(g, lhs) - eval_concept(g, rhs))
    return bool(np.all(violation == 0.0)), violation


def fuzzy_success_rate(g: Grounding, tbox) -> float:
    """Percentage of TBox axioms satisfied in the strict fuzzy sense (``C(a) <= D(a)`` everywhere)."""
    if not tbox:
        raise EmptyTBox("success rate of an empty TBox is undefined")
    ok = 0
    for ax in tbox:
        ok += all(fuzzy_inclusion_check(g, inc.left, inc.right)[0] for inc in _inclusions(ax))
    return 100.0 * ok / len(tbox)


def _inclusions(ax):
    return ax.inclusions() if hasattr(ax, "inclusions") else (ax.inclusion(),)
