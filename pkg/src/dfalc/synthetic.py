"""Seeded synthetic ontologies with a known model, and grounding masks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from .crisp import ThreeValued, classical_eval, crisp_eval_concept, crispify
from .errors import UnsatisfiableSpec
from .grounding import Grounding
from .syntax import (
    And,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    Inclusion,
    Name,
    Not,
    Ontology,
    Or,
    RoleAssertion,
    Signature,
)

AXIOM_KINDS = (1, 2, 3, 4, 5, 6, 7, "compound")


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a synthetic ontology.

    ``n_axioms`` is either a total, spread over the seven normal forms and
    compound inclusions at random, or a map from kind (1-7 or ``"compound"``)
    to count. An axiom is kept only if the hidden interpretation satisfies it,
    its left side holds somewhere and its right side fails somewhere, so no
    kept axiom is vacuous. Candidates that none of a batch of random
    interpretations refutes (such as ``A ⊑ A ⊔ B``) are dropped as likely
    tautologies. With a total count, a kind that yields no such axiom within
    ``max_attempts`` is replaced by another kind; with a map it is an error.

    A purely random interpretation satisfies almost no quantified inclusion,
    so structure is planted: with probability ``definition_rate`` a concept
    (after the first two) is computed from earlier ones by one constructor,
    then optionally widened or narrowed by noise. Without an explicit
    ``role_density`` roles are sparse, about two successors per individual.
    """

    n_individuals: int
    n_concepts: int
    n_roles: int
    n_axioms: Union[int, Mapping] = 10
    density: float = 0.5
    seed: int = 0
    role_density: Optional[float] = None
    negation_rate: float = 0.25
    definition_rate: float = 0.6
    max_attempts: int = 5000

    def __post_init__(self):
        for k in ("n_individuals", "n_concepts", "n_roles"):
            if getattr(self, k) < 0:
                raise ValueError(f"{k} must be non-negative")
        counts = self.n_axioms.values() if isinstance(self.n_axioms, Mapping) else [self.n_axioms]
        if any(c < 0 for c in counts):
            raise ValueError("axiom counts must be non-negative")
        if isinstance(self.n_axioms, Mapping) and set(self.n_axioms) - set(AXIOM_KINDS):
            raise ValueError(f"axiom kinds must be among {AXIOM_KINDS}")
        for d in (self.density, self.role_density if self.role_density is not None else self.density):
            if not 0.0 < d < 1.0:
                raise ValueError("densities must lie in (0, 1)")

    @property
    def effective_role_density(self) -> float:
        """Role density; by default about two successors per individual."""
        if self.role_density is not None:
            return self.role_density
        return min(self.density, 2.0 / max(self.n_individuals, 1))

    def to_dict(self) -> dict:
        n = dict(self.n_axioms) if isinstance(self.n_axioms, Mapping) else self.n_axioms
        if isinstance(n, dict):
            n = {str(k): v for k, v in n.items()}
        return {
            "n_individuals": self.n_individuals,
            "n_concepts": self.n_concepts,
            "n_roles": self.n_roles,
            "n_axioms": n,
            "density": self.density,
            "role_density": self.role_density,
            "negation_rate": self.negation_rate,
            "definition_rate": self.definition_rate,
            "max_attempts": self.max_attempts,
            "seed": self.seed,
        }


def synthetic_signature(spec: SyntheticSpec) -> Signature:
    return Signature(
        tuple(f"C{k}" for k in range(spec.n_concepts)),
        tuple(f"r{k}" for k in range(spec.n_roles)),
        tuple(f"i{k}" for k in range(spec.n_individuals)),
    )


class _Sampler:
    def __init__(self, spec: SyntheticSpec, sig: Signature, rng: np.random.Generator):
        self.spec, self.sig, self.rng = spec, sig, rng

    def name(self) -> Concept:
        return Name(self.sig.concepts[self.rng.integers(len(self.sig.concepts))])

    def literal(self) -> Concept:
        n = self.name()
        return Not(n) if self.rng.random() < self.spec.negation_rate else n

    def role(self) -> str:
        return self.sig.roles[self.rng.integers(len(self.sig.roles))]

    def normal(self, form: int) -> Inclusion:
        lit = self.literal
        if form == 1:
            return Inclusion(lit(), lit())
        if form == 2:
            return Inclusion(And(lit(), lit()), lit())
        if form == 3:
            return Inclusion(lit(), Or(lit(), lit()))
        if form == 4:
            return Inclusion(lit(), Exists(self.role(), lit()))
        if form == 5:
            return Inclusion(lit(), Forall(self.role(), lit()))
        if form == 6:
            return Inclusion(Exists(self.role(), lit()), lit())
        return Inclusion(Forall(self.role(), lit()), lit())

    def compound(self, depth: int) -> Concept:
        if depth == 0:
            return self.literal()
        kinds = ["and", "or"] + (["some", "only"] if self.sig.roles else [])
        kind = kinds[self.rng.integers(len(kinds))]
        sub = lambda: self.compound(int(self.rng.integers(depth)))  # noqa: E731
        if kind == "and":
            return And(sub(), sub())
        if kind == "or":
            return Or(sub(), sub())
        cls = Exists if kind == "some" else Forall
        return cls(self.role(), sub())

    def candidate(self, kind) -> Inclusion:
        if kind == "compound":
            return Inclusion(self.compound(int(self.rng.integers(1, 3))), self.compound(int(self.rng.integers(1, 3))))
        return self.normal(kind)


def _plant_concepts(spec: SyntheticSpec, sig: Signature, roles: np.ndarray, rng) -> np.ndarray:
    n = spec.n_individuals
    concepts = np.zeros((spec.n_concepts, n))
    # cycle through constructors so that every one gets planted early
    kinds = ["some", "only", "and", "or"] if spec.n_roles else ["and", "or"]
    kinds = [kinds[i] for i in rng.permutation(len(kinds))]
    planted = 0
    for k in range(spec.n_concepts):
        concepts[k] = rng.random(n) < spec.density
        if k < 2 or rng.random() >= spec.definition_rate:
            continue
        partial = Grounding(Signature(sig.concepts[:k], sig.roles, sig.individuals), concepts[:k], roles)
        sampler = _Sampler(spec, partial.signature, rng)
        kind = kinds[planted % len(kinds)]
        planted += 1
        if kind == "and":
            expr = And(sampler.literal(), sampler.literal())
        elif kind == "or":
            expr = Or(sampler.literal(), sampler.literal())
        else:
            expr = (Exists if kind == "some" else Forall)(sampler.role(), sampler.literal())
        value = crisp_eval_concept(crispify(partial), expr) == ThreeValued.TRUE
        noise = rng.random(n)
        mode = rng.integers(3)
        if mode == 1:  # widen
            value |= noise < 0.15
        elif mode == 2:  # narrow
            value &= noise >= 0.15
        concepts[k] = value
    return concepts


def _refutable(ax: Inclusion, sig: Signature, refuters) -> bool:
    lhs = classical_eval(ax.left, sig, *refuters)
    rhs = classical_eval(ax.right, sig, *refuters)
    return bool(np.any(lhs & ~rhs))


def _usable_kinds(spec: SyntheticSpec) -> list:
    return [k for k in AXIOM_KINDS if spec.n_roles > 0 or k in (1, 2, 3, "compound")]


def _plan(spec: SyntheticSpec, rng: np.random.Generator) -> list:
    kinds = _usable_kinds(spec)
    if isinstance(spec.n_axioms, Mapping):
        plan = []
        for k in AXIOM_KINDS:
            plan += [k] * int(spec.n_axioms.get(k, 0))
        return plan
    return [kinds[i] for i in rng.integers(len(kinds), size=spec.n_axioms)]


def gen_synthetic(spec: SyntheticSpec) -> tuple[Ontology, Grounding]:
    """Sample a crisp interpretation and axioms it satisfies.

    Returns the ontology (TBox plus the full interpretation as a 0/1 ABox)
    and the interpretation itself as a grounding.
    """
    rng = np.random.default_rng(spec.seed)
    sig = synthetic_signature(spec)
    n = spec.n_individuals
    rd = spec.effective_role_density
    roles = (rng.random((spec.n_roles, n, n)) < rd).astype(float)
    concepts = _plant_concepts(spec, sig, roles, rng)
    ideal = Grounding(sig, concepts, roles)
    ci = crispify(ideal)

    plan = _plan(spec, rng)
    if plan and (spec.n_concepts == 0 or n == 0):
        raise UnsatisfiableSpec("axioms need at least one concept and one individual")
    if any(k in (4, 5, 6, 7) for k in plan) and spec.n_roles == 0:
        raise UnsatisfiableSpec("quantified forms need at least one role")

    refuters = (
        rng.random((64, spec.n_concepts, n)) < 0.5,
        rng.random((64, spec.n_roles, n, n)) < rd,
    )
    sampler = _Sampler(spec, sig, rng)
    tbox: list[Inclusion] = []
    seen: set[Inclusion] = set()
    true, false = ThreeValued.TRUE, ThreeValued.FALSE

    def search(kind):
        for _ in range(spec.max_attempts):
            ax = sampler.candidate(kind)
            if ax in seen:
                continue
            lhs = crisp_eval_concept(ci, ax.left)
            rhs = crisp_eval_concept(ci, ax.right)
            holds = not np.any((lhs == true) & (rhs == false))
            if holds and np.any(lhs == true) and np.any(rhs == false) and _refutable(ax, sig, refuters):
                return ax
        return None

    usable = _usable_kinds(spec)
    for kind in plan:
        ax = search(kind)
        if ax is None and not isinstance(spec.n_axioms, Mapping):
            # a total count leaves the kinds open, so try the others before giving up
            others = [k for k in usable if k != kind]
            for i in rng.permutation(len(others)):
                ax = search(others[i])
                if ax is not None:
                    break
        if ax is None:
            raise UnsatisfiableSpec(f"no non-vacuous axiom of kind {kind!r} found in {spec.max_attempts} attempts")
        tbox.append(ax)
        seen.add(ax)

    abox = []
    for c, name in enumerate(sig.concepts):
        for i, ind in enumerate(sig.individuals):
            abox.append(ConceptAssertion(ind, Name(name), float(concepts[c, i])))
    for r, role in enumerate(sig.roles):
        for i, a in enumerate(sig.individuals):
            for j, b in enumerate(sig.individuals):
                abox.append(RoleAssertion(a, b, role, float(roles[r, i, j])))
    return Ontology(tuple(tbox), tuple(abox), sig), ideal


@dataclass(frozen=True)
class MaskSpec:
    rate: float
    unknown_region: tuple[float, float] = field(default=(0.2, 0.8))
    seed: int = 0
    concepts_only: bool = False

    def __post_init__(self):
        lo, hi = self.unknown_region
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("unknown region must be a sub-interval of [0, 1]")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("mask rate must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "unknown_region": list(self.unknown_region),
            "seed": self.seed,
            "concepts_only": self.concepts_only,
        }


def n_masked(rate: float, total: int) -> int:
    # round first so that e.g. 0.6 * 100 counts 60 entries, not 61
    return min(total, math.ceil(round(rate * total, 9)))


def mask_grounding(g: Grounding, m: MaskSpec) -> Grounding:
    """Overwrite a random subset of entries with uniform draws from the unknown region."""
    rng = np.random.default_rng(m.seed)
    c = np.array(g.concepts).ravel()
    r = np.array(g.roles).ravel()
    flat = c if m.concepts_only else np.concatenate([c, r])
    k = n_masked(m.rate, flat.size)
    idx = rng.choice(flat.size, size=k, replace=False)
    lo, hi = m.unknown_region
    flat[idx] = rng.uniform(lo, hi, size=k)
    concepts = flat[: c.size].reshape(g.concepts.shape)
    roles = r.reshape(g.roles.shape) if m.concepts_only else flat[c.size :].reshape(g.roles.shape)
    return g.replace(concepts, roles)
