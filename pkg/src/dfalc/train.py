"""Projected Adam descent on a grounding, with early stopping."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from os import PathLike
from typing import Optional

import numpy as np

from .errors import NonFiniteGradient, ShapeMismatch
from .grounding import Grounding
from .losses import CompiledTBox, GradientSet

LOSS_KINDS = ("hierarchical", "rule")
TNORMS = ("product", "godel")


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: str = "hierarchical"
    learning_rate: float = 2e-4
    patience: int = 10
    max_epochs: int = 20000
    alpha_prime: float = 0.8
    tnorm: str = "product"
    seed: int = 0
    tolerance: float = 1e-9
    clamp_evidence: bool = True
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.tnorm not in TNORMS:
            raise ValueError(f"tnorm must be one of {TNORMS}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0.5 <= self.alpha_prime <= 1.0:
            raise ValueError("alpha_prime must lie in [0.5, 1]")
        if self.patience < 1 or self.max_epochs < 1:
            raise ValueError("patience and max_epochs must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AdamState:
    m_concepts: np.ndarray
    v_concepts: np.ndarray
    m_roles: np.ndarray
    v_roles: np.ndarray
    t: int = 0

    @classmethod
    def zeros_like(cls, g: Grounding) -> "AdamState":
        return cls(
            np.zeros(g.concepts.shape),
            np.zeros(g.concepts.shape),
            np.zeros(g.roles.shape),
            np.zeros(g.roles.shape),
        )


def _adam_update(x, grad, m, v, t, cfg):
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    x = x - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return np.clip(x, 0.0, 1.0), m, v


def adam_step(
    g: Grounding, grads: GradientSet, state: Optional[AdamState] = None, cfg: TrainConfig = TrainConfig()
) -> tuple[Grounding, AdamState]:
    """One Adam update followed by projection of every entry onto [0, 1]."""
    if grads.concepts.shape != g.concepts.shape or grads.roles.shape != g.roles.shape:
        raise ShapeMismatch("gradient shapes do not match the grounding")
    if not grads.is_finite():
        raise NonFiniteGradient("gradient contains NaN or infinity")
    state = state or AdamState.zeros_like(g)
    t = state.t + 1
    c, mc, vc = _adam_update(g.concepts, grads.concepts, state.m_concepts, state.v_concepts, t, cfg)
    r, mr, vr = _adam_update(g.roles, grads.roles, state.m_roles, state.v_roles, t, cfg)
    return g.replace(c, r, check=False), AdamState(mc, vc, mr, vr, t)


class Objective:
    """Loss-and-gradient callable for one normalized TBox over one signature."""

    def __init__(self, nt, signature, cfg: TrainConfig):
        self.compiled = CompiledTBox.of(nt, signature)
        self.cfg = cfg

    def __call__(self, concepts: np.ndarray, roles: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        cfg = self.cfg
        if cfg.loss_kind == "hierarchical":
            return self.compiled.hierarchical(concepts, roles)
        w = self.compiled.rule_weights(concepts, roles, cfg.alpha_prime, cfg.tnorm, cfg.clamp_evidence)
        return self.compiled.rule(concepts, roles, w)


@dataclass
class History:
    """Per-epoch training record."""

    losses: list[float] = field(default_factory=list)
    best: list[float] = field(default_factory=list)
    stalled: list[int] = field(default_factory=list)
    stop_reason: str = ""

    def __len__(self):
        return len(self.losses)

    def __iter__(self):
        return iter(self.losses)

    def __getitem__(self, k):
        return self.losses[k]

    def __eq__(self, other):
        if isinstance(other, History):
            return self.losses == other.losses and self.stop_reason == other.stop_reason
        return self.losses == list(other)

    def write_csv(self, path: str | PathLike) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "loss", "best_loss", "stalled_epochs"])
            for k, (loss, best, stalled) in enumerate(zip(self.losses, self.best, self.stalled)):
                w.writerow([k, repr(loss), repr(best), stalled])


def train(init: Grounding, nt, cfg: TrainConfig = TrainConfig()) -> tuple[Grounding, History]:
    """Revise ``init`` by full-batch projected Adam until the loss vanishes or stalls.

    Stops when the loss drops to ``cfg.tolerance``, after ``cfg.max_epochs``
    epochs, or once the best loss has not improved for ``cfg.patience``
    consecutive epochs. Returns the grounding that attained the best loss.
    """
    objective = Objective(nt, init.signature, cfg)
    x_c = np.array(init.concepts)
    x_r = np.array(init.roles)
    state = AdamState.zeros_like(init)
    hist = History()
    best = np.inf
    best_c, best_r = x_c, x_r
    stalled = 0
    for epoch in range(cfg.max_epochs):
        loss, gc, gr = objective(x_c, x_r)
        if not (np.isfinite(loss) and np.all(np.isfinite(gc)) and np.all(np.isfinite(gr))):
            raise NonFiniteGradient(f"non-finite loss or gradient at epoch {epoch}")
        if loss < best:
            best, best_c, best_r, stalled = loss, x_c, x_r, 0
        else:
            stalled += 1
        hist.losses.append(loss)
        hist.best.append(best)
        hist.stalled.append(stalled)
        if loss <= cfg.tolerance:
            hist.stop_reason = "converged"
            break
        if stalled >= cfg.patience:
            hist.stop_reason = "stalled"
            break
        if epoch + 1 == cfg.max_epochs:
            hist.stop_reason = "max_epochs"
            break
        state.t += 1
        x_c, state.m_concepts, state.v_concepts = _adam_update(
            x_c, gc, state.m_concepts, state.v_concepts, state.t, cfg
        )
        x_r, state.m_roles, state.v_roles = _adam_update(x_r, gr, state.m_roles, state.v_roles, state.t, cfg)
    return init.replace(best_c, best_r, check=False), hist
