"""Crisp views of fuzzy groundings.

``crispify`` thresholds every degree into True / Unknown / False. Concepts
and axioms are then evaluated in strong-Kleene three-valued logic, which is
the ordinary Gödel min/max/complement arithmetic on the chain
False(0) < Unknown(1) < True(2).

This module also holds the exhaustive classical model enumerator used as an
oracle for small ontologies.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyTBox, TooLarge, UnknownName
from .grounding import Grounding, evaluate
from .syntax import (
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
)


class ThreeValued(enum.IntEnum):
    FALSE = 0
    UNKNOWN = 1
    TRUE = 2


@dataclass(frozen=True)
class CrispConfig:
    alpha: float = 0.5

    def __post_init__(self):
        if not 0.5 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0.5, 1], got {self.alpha}")


@dataclass(frozen=True, eq=False)
class CrispInterpretation:
    signature: Signature
    concepts: np.ndarray  # int8 codes, shape (n_concepts, n)
    roles: np.ndarray  # int8 codes, shape (n_roles, n, n)

    def concept(self, name: str) -> np.ndarray:
        try:
            return self.concepts[self.signature.concept_index[name]]
        except KeyError:
            raise UnknownName(f"concept {name!r} is not in the interpretation") from None

    def role(self, name: str) -> np.ndarray:
        try:
            return self.roles[self.signature.role_index[name]]
        except KeyError:
            raise UnknownName(f"role {name!r} is not in the interpretation") from None


def threshold(values, alpha: float) -> np.ndarray:
    """Elementwise crisp transformation of degrees into ThreeValued codes."""
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, ThreeValued.UNKNOWN, dtype=np.int8)
    out[values > alpha] = ThreeValued.TRUE
    # written as 1 - n > alpha so that crispifying a complement mirrors the TRUE branch exactly
    out[1.0 - values > alpha] = ThreeValued.FALSE
    return out


def crispify(g: Grounding, cfg: CrispConfig | float = CrispConfig()) -> CrispInterpretation:
    alpha = cfg.alpha if isinstance(cfg, CrispConfig) else CrispConfig(cfg).alpha
    return CrispInterpretation(g.signature, threshold(g.concepts, alpha), threshold(g.roles, alpha))


def crisp_eval_concept(ci: CrispInterpretation, c: Concept) -> np.ndarray:
    n = len(ci.signature.individuals)
    return evaluate(c, ci.concept, ci.role, np.int8(2), (n,)).astype(np.int8)


def _inclusion_value(ci: CrispInterpretation, lhs: Concept, rhs: Concept) -> ThreeValued:
    implied = np.maximum(2 - crisp_eval_concept(ci, lhs), crisp_eval_concept(ci, rhs))
    return ThreeValued(int(implied.min(initial=2)))


def crisp_eval_axiom(ci: CrispInterpretation, ax) -> ThreeValued:
    """False on a definite counterexample, True if every individual definitely complies."""
    if isinstance(ax, (Inclusion, Equivalence)):
        incs = ax.inclusions()
    else:
        incs = (ax.inclusion(),)
    return ThreeValued(min(_inclusion_value(ci, i.left, i.right) for i in incs))


POLICIES = ("unknown-satisfies", "unknown-fails")


def success_rate(ci: CrispInterpretation, tbox, policy: str = "unknown-satisfies") -> float:
    """Percentage of ``tbox`` axioms satisfied by ``ci``.

    Under ``unknown-satisfies`` an axiom counts unless it is definitely
    violated; under ``unknown-fails`` only definitely true axioms count.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    tbox = list(tbox)
    if not tbox:
        raise EmptyTBox("success rate of an empty TBox is undefined")
    floor = ThreeValued.UNKNOWN if policy == "unknown-satisfies" else ThreeValued.TRUE
    ok = sum(crisp_eval_axiom(ci, ax) >= floor for ax in tbox)
    return 100.0 * ok / len(tbox)


# -- classical brute force -----------------------------------------------------

MAX_BITS = 20


def n_bits(signature: Signature, domain_size: int) -> int:
    return len(signature.concepts) * domain_size + len(signature.roles) * domain_size**2


def classical_eval(c: Concept, signature: Signature, concepts: np.ndarray, roles: np.ndarray) -> np.ndarray:
    """Boolean set semantics on batches: ``concepts`` is (B, n_c, d), ``roles`` (B, n_r, d, d)."""
    if isinstance(c, Name):
        return concepts[:, signature.concept_index[c.name], :]
    if isinstance(c, Top):
        return np.ones(concepts.shape[::2], dtype=bool)
    if isinstance(c, Bottom):
        return np.zeros(concepts.shape[::2], dtype=bool)
    if isinstance(c, Not):
        return ~classical_eval(c.arg, signature, concepts, roles)
    if isinstance(c, And):
        return classical_eval(c.left, signature, concepts, roles) & classical_eval(c.right, signature, concepts, roles)
    if isinstance(c, Or):
        return classical_eval(c.left, signature, concepts, roles) | classical_eval(c.right, signature, concepts, roles)
    r = roles[:, signature.role_index[c.role]]
    f = classical_eval(c.filler, signature, concepts, roles)[:, None, :]
    if isinstance(c, Exists):
        return (r & f).any(axis=-1)
    if isinstance(c, Forall):
        return (~r | f).all(axis=-1)
    raise TypeError(f"not a concept: {c!r}")


def decode(signature: Signature, domain_size: int, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bit-unpack interpretation codes: concept entries first (row-major), then roles."""
    d = domain_size
    nc, nr = len(signature.concepts), len(signature.roles)
    nbits = nc * d + nr * d * d
    bits = ((codes[:, None] >> np.arange(nbits, dtype=np.int64)) & 1).astype(bool)
    b = len(codes)
    return bits[:, : nc * d].reshape(b, nc, d), bits[:, nc * d :].reshape(b, nr, d, d)


def encode(concepts: np.ndarray, roles: np.ndarray) -> np.ndarray:
    """Inverse of :func:`decode` for boolean batches."""
    b = concepts.shape[0]
    flat = [x.reshape(b, int(np.prod(x.shape[1:]))) for x in (concepts, roles)]
    bits = np.concatenate(flat, axis=1).astype(np.int64)
    return (bits << np.arange(bits.shape[1], dtype=np.int64)).sum(axis=1)


def _code_batches(nbits: int, chunk: int = 1 << 15) -> Iterator[np.ndarray]:
    total = 1 << nbits
    for start in range(0, total, chunk):
        yield np.arange(start, min(start + chunk, total), dtype=np.int64)


def _abox_constraints(o: Ontology, alpha: float):
    """(assertion, wanted truth) pairs after crisp transformation; unknowns impose nothing."""
    out = []
    for a in o.abox:
        n = a.degree
        if n > alpha:
            out.append((a, True))
        elif 1.0 - n > alpha:
            out.append((a, False))
    return out


def model_codes(
    signature: Signature,
    axioms: Iterable,
    domain_size: int,
    abox: Ontology | None = None,
    alpha: float = 0.5,
) -> np.ndarray:
    """Codes of every classical interpretation over ``domain_size`` elements satisfying ``axioms``.

    ``axioms`` may be TBox axioms or normalized axioms. Individuals of
    ``signature`` name domain elements 0, 1, ... in order; ABox assertions of
    ``abox`` are thresholded at ``alpha`` and enforced.
    """
    if domain_size < 1:
        raise ValueError("domain must be non-empty")
    nbits = n_bits(signature, domain_size)
    if nbits > MAX_BITS:
        raise TooLarge(f"{nbits} interpretation bits exceed the limit of {MAX_BITS}")
    incs = []
    for ax in axioms:
        incs.extend(ax.inclusions() if hasattr(ax, "inclusions") else (ax.inclusion(),))
    constraints = []
    if abox is not None:
        if len(signature.individuals) > domain_size:
            raise ValueError("more individuals than domain elements")
        constraints = _abox_constraints(abox, alpha)
    found = []
    for codes in _code_batches(nbits):
        concepts, roles = decode(signature, domain_size, codes)
        ok = np.ones(len(codes), dtype=bool)
        for inc in incs:
            lhs = classical_eval(inc.left, signature, concepts, roles)
            rhs = classical_eval(inc.right, signature, concepts, roles)
            ok &= ~(lhs & ~rhs).any(axis=1)
        for a, want in constraints:
            if isinstance(a, ConceptAssertion):
                i = signature.individual_index[a.individual]
                holds = classical_eval(a.concept, signature, concepts, roles)[:, i]
            else:
                i, j = signature.individual_index[a.subject], signature.individual_index[a.object]
                holds = roles[:, signature.role_index[a.role], i, j]
            ok &= holds == want
        found.append(codes[ok])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)


def brute_force_models(signature: Signature, o: Ontology, domain_size: int) -> list[Grounding]:
    """All {0,1}-valued groundings over ``domain_size`` elements that classically satisfy ``o``."""
    individuals = list(signature.individuals[:domain_size])
    individuals += [f"d{k}" for k in range(len(individuals), domain_size)]
    sig = Signature(signature.concepts, signature.roles, tuple(individuals))
    codes = model_codes(sig, o.tbox, domain_size, abox=o)
    concepts, roles = decode(sig, domain_size, codes)
    return [Grounding(sig, c.astype(float), r.astype(float), check=False) for c, r in zip(concepts, roles)]
