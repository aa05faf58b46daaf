"""Masked-revision and query-answering experiments with JSON reports.

A report is deterministic given its inputs except for the ``timestamp``
object, which holds the creation time and wall-clock runtime.
"""

from __future__ import annotations

import datetime
import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .crisp import crispify, success_rate
from .errors import UnknownName, UnsatisfiableSpec
from .grounding import Grounding, eval_concept, fuzzy_success_rate
from .normalize import normalize, seed_fresh_assertions
from .parser import render_concept
from .synthetic import MaskSpec, SyntheticSpec, gen_synthetic, mask_grounding
from .syntax import And, Concept, Exists, Name, Ontology
from .train import TrainConfig, train

SCHEMA = "dfalc.report/1"
SHAPES = ("conj2", "exist2")


@dataclass(frozen=True)
class Query:
    """``C ⊓ D`` (conj2) or ``C ⊓ ∃r.D`` (exist2)."""

    shape: str
    concepts: tuple[str, str]
    role: Optional[str] = None
    threshold: float = 0.8

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"query shape must be one of {SHAPES}")
        if (self.shape == "exist2") != (self.role is not None):
            raise ValueError("exist2 queries need a role, conj2 queries take none")

    @property
    def concept(self) -> Concept:
        c, d = (Name(x) for x in self.concepts)
        return And(c, Exists(self.role, d)) if self.shape == "exist2" else And(c, d)

    def __str__(self):
        return render_concept(self.concept)


def answer_query(g: Grounding, q: Query) -> frozenset[str]:
    sig = g.signature
    for c in q.concepts:
        if c not in sig.concept_index:
            raise UnknownName(f"concept {c!r} is not in the grounding")
    if q.role is not None and q.role not in sig.role_index:
        raise UnknownName(f"role {q.role!r} is not in the grounding")
    v = eval_concept(g, q.concept)
    return frozenset(a for a, x in zip(sig.individuals, v) if x >= q.threshold)


def precision_recall(predicted: Iterable, oracle: Iterable) -> tuple[float, float]:
    predicted, oracle = set(predicted), set(oracle)
    hit = len(predicted & oracle)
    if predicted:
        precision = hit / len(predicted)
    else:
        precision = 1.0 if not oracle else 0.0
    recall = hit / len(oracle) if oracle else 1.0
    return precision, recall


def generate_queries(
    ideal: Grounding, shape: str, n: int, rng: np.random.Generator, threshold: float = 0.8
) -> list[Query]:
    """``n`` random queries of ``shape`` whose answer on ``ideal`` is non-empty.

    Queries are drawn without replacement from all answerable ones over two
    distinct concept names; if there are fewer than ``n``, repeats fill the
    rest.
    """
    sig = ideal.signature
    roles = sig.roles if shape == "exist2" else (None,)
    pool = [
        Query(shape, (c, d), r, threshold)
        for c in sig.concepts
        for d in sig.concepts
        if c != d
        for r in roles
    ]
    pool = [q for q in pool if answer_query(ideal, q)]
    if not pool:
        raise UnsatisfiableSpec(f"no {shape} query has a non-empty answer")
    if len(pool) >= n:
        idx = rng.choice(len(pool), size=n, replace=False)
    else:
        idx = np.concatenate([np.arange(len(pool)), rng.integers(len(pool), size=n - len(pool))])
    return [pool[i] for i in idx]


@dataclass
class Report:
    experiment: str
    config: dict
    results: dict
    runtime_seconds: float = 0.0
    created: str = field(default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat())

    def to_dict(self, timestamp: bool = True) -> dict:
        d = {"schema": SCHEMA, "experiment": self.experiment, "config": self.config, "results": self.results}
        if timestamp:
            d["timestamp"] = {"created": self.created, "runtime_seconds": self.runtime_seconds}
        return d

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def _summary(h) -> dict:
    return {
        "epochs": len(h),
        "final_loss": h.losses[-1] if len(h) else None,
        "best_loss": h.best[-1] if len(h) else None,
        "stop_reason": h.stop_reason,
    }


def _rates(g: Grounding, o: Ontology) -> dict:
    ci = crispify(g, 0.5)
    return {
        "crisp": success_rate(ci, o.tbox, "unknown-satisfies"),
        "crisp_strict": success_rate(ci, o.tbox, "unknown-fails"),
        "fuzzy": fuzzy_success_rate(g, o.tbox),
    }


def revise(o: Ontology, masked: Grounding, t: TrainConfig):
    """Normalize, seed the introduced names from ``masked``, train; returns the result over sig(o)."""
    nt = normalize(o)
    trained, hist = train(seed_fresh_assertions(nt, masked), nt, t)
    return trained.reindex(masked.signature), hist


def run_mask_revision(o: Ontology, ideal: Grounding, m: MaskSpec, t: TrainConfig = TrainConfig()) -> Report:
    """Mask ``ideal``, revise it against ``o``'s TBox, and score both groundings.

    Rates are percentages of ``o``'s original axioms satisfied: ``crisp``
    counts unknown verdicts as satisfied, ``crisp_strict`` does not, and
    ``fuzzy`` requires the exact fuzzy inclusion.
    """
    start = time.perf_counter()
    masked = mask_grounding(ideal, m)
    revised, hist = revise(o, masked, t)
    results = {"masked": _rates(masked, o), "revised": _rates(revised, o), "training": _summary(hist)}
    config = {"mask": m.to_dict(), "train": t.to_dict(), "n_axioms": len(o.tbox)}
    return Report("mask-revision", config, results, time.perf_counter() - start)


def run_cqa(
    o: Ontology,
    ideal: Grounding,
    m: MaskSpec,
    t: TrainConfig = TrainConfig(),
    n_queries: int = 20,
    threshold: float = 0.8,
    query_seed: Optional[int] = None,
) -> Report:
    """Macro precision and recall of query answers on masked and revised groundings.

    Queries are drawn from the ideal grounding, which also provides the
    oracle answers.
    """
    start = time.perf_counter()
    qseed = m.seed if query_seed is None else query_seed
    rng = np.random.default_rng(np.random.SeedSequence(qseed, spawn_key=(1,)))
    masked = mask_grounding(ideal, m)
    revised, hist = revise(o, masked, t)
    shapes = [s for s in SHAPES if s == "conj2" or ideal.signature.roles]
    results: dict = {"training": _summary(hist)}
    for shape in shapes:
        rows = []
        for q in generate_queries(ideal, shape, n_queries, rng, threshold):
            oracle = answer_query(ideal, q)
            row = {"query": str(q), "oracle_size": len(oracle)}
            for label, g in (("masked", masked), ("revised", revised)):
                p, r = precision_recall(answer_query(g, q), oracle)
                row[label] = {"precision": p, "recall": r}
            rows.append(row)
        results[shape] = {
            label: {
                "precision": float(np.mean([r[label]["precision"] for r in rows])),
                "recall": float(np.mean([r[label]["recall"] for r in rows])),
            }
            for label in ("masked", "revised")
        }
        results[shape]["queries"] = rows
    config = {
        "mask": m.to_dict(),
        "train": t.to_dict(),
        "n_queries": n_queries,
        "threshold": threshold,
        "query_seed": qseed,
    }
    return Report("cqa", config, results, time.perf_counter() - start)


def synthetic_suite(
    count: int,
    seed: int,
    individuals=(8, 16),
    concepts=(5, 8),
    roles=(1, 2),
    axioms=(10, 20),
    max_tries: int = 1000,
) -> list[tuple[SyntheticSpec, Ontology, Grounding]]:
    """``count`` synthetic ontologies with sizes drawn uniformly from the inclusive ranges.

    Specs the generator cannot satisfy are skipped.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_tries):
        if len(out) == count:
            return out
        spec = SyntheticSpec(
            int(rng.integers(individuals[0], individuals[1] + 1)),
            int(rng.integers(concepts[0], concepts[1] + 1)),
            int(rng.integers(roles[0], roles[1] + 1)),
            int(rng.integers(axioms[0], axioms[1] + 1)),
            seed=int(rng.integers(2**31)),
        )
        try:
            o, ideal = gen_synthetic(spec)
        except UnsatisfiableSpec:
            continue
        out.append((spec, o, ideal))
    raise UnsatisfiableSpec(f"only {len(out)} of {count} synthetic ontologies could be generated")
