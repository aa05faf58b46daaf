"""Hierarchical and rule-based losses over normalized TBoxes, with subgradients.

Both losses are evaluated on whole arrays, one numpy pass per normal form.
Gradients are written out by hand. Where an operation has a kink the
subgradient follows fixed conventions:

* ``min``/``max`` of two operands feed the first operand on a tie;
* ``sup``/``inf`` over the domain feed the lowest-index attaining individual;
* a hinge ``max(0, x)`` has slope 0 at ``x = 0``.

In the rule-based loss every ``G(v, w) = max(0, v - w)`` factor is a
constant weight: gradient flows only through the ``1 - X`` factor that the
rule wants to raise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ShapeMismatch, UnknownName, UnsupportedForm
from .grounding import Grounding
from .normalize import NormalAxiom, NormalizedTBox
from .syntax import Bottom, Signature, Top


@dataclass
class GradientSet:
    """Gradient arrays shaped like a grounding's concept and role tables."""

    concepts: np.ndarray
    roles: np.ndarray

    def concept(self, signature: Signature, name: str) -> np.ndarray:
        return self.concepts[signature.concept_index[name]]

    def role(self, signature: Signature, name: str) -> np.ndarray:
        return self.roles[signature.role_index[name]]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.concepts)) and np.all(np.isfinite(self.roles)))


class _Lits:
    """A column of literals, one per axiom, read from the augmented concept table.

    Rows ``n_c`` and ``n_c + 1`` of the augmented table are the constant
    ``Nothing`` (all zeros) and ``Thing`` (all ones) vectors.
    """

    def __init__(self, rows, neg):
        self.rows = np.asarray(rows, dtype=np.intp)
        self.neg = np.asarray(neg, dtype=bool)

    def value(self, xa: np.ndarray) -> np.ndarray:
        v = xa[self.rows]
        return np.where(self.neg[:, None], 1.0 - v, v)

    def backward(self, g: np.ndarray, gxa: np.ndarray) -> None:
        np.add.at(gxa, self.rows, np.where(self.neg[:, None], -g, g))


def _hinge(x):
    return np.maximum(0.0, x)


@dataclass
class _FormGroup:
    form: int
    lits: dict  # slot name -> _Lits
    role: Optional[np.ndarray]  # role row per axiom, for forms 4-7

    def __len__(self):
        return len(self.role) if self.role is not None else len(next(iter(self.lits.values())).rows)


# slot layout per form: which literal operands each axiom carries
_SLOTS = {
    1: ("a", "b"),  # a ⊑ b
    2: ("a1", "a2", "b"),  # a1 ⊓ a2 ⊑ b
    3: ("a", "b1", "b2"),  # a ⊑ b1 ⊔ b2
    4: ("a", "f"),  # a ⊑ ∃r.f
    5: ("a", "f"),  # a ⊑ ∀r.f
    6: ("f", "b"),  # ∃r.f ⊑ b
    7: ("f", "b"),  # ∀r.f ⊑ b
}


class CompiledTBox:
    """Normal axioms grouped by form, with operands resolved to table rows."""

    def __init__(self, axioms: Iterable[NormalAxiom], signature: Signature):
        self.signature = signature
        nc = len(signature.concepts)
        axioms = list(axioms)
        self.n_axioms = len(axioms)
        buckets: dict[int, list[NormalAxiom]] = {}
        for ax in axioms:
            if not isinstance(ax, NormalAxiom) or ax.form not in _SLOTS:
                raise UnsupportedForm(f"axiom escaped normalization: {ax!r}")
            buckets.setdefault(ax.form, []).append(ax)

        def row(lit):
            if isinstance(lit.atom, Bottom):
                return nc
            if isinstance(lit.atom, Top):
                return nc + 1
            try:
                return signature.concept_index[lit.atom.name]
            except KeyError:
                raise UnknownName(f"concept {lit.atom.name!r} is not in the grounding") from None

        self.groups: list[_FormGroup] = []
        for form in sorted(buckets):
            rows = {s: [] for s in _SLOTS[form]}
            negs = {s: [] for s in _SLOTS[form]}
            roles = []
            for ax in buckets[form]:
                lhs, rhs = ax.literals()
                for slot, lit in zip(_SLOTS[form], lhs + rhs):
                    rows[slot].append(row(lit))
                    negs[slot].append(lit.negated)
                if form >= 4:
                    try:
                        roles.append(signature.role_index[ax.role])
                    except KeyError:
                        raise UnknownName(f"role {ax.role!r} is not in the grounding") from None
            lits = {s: _Lits(rows[s], negs[s]) for s in _SLOTS[form]}
            role = np.asarray(roles, dtype=np.intp) if form >= 4 else None
            self.groups.append(_FormGroup(form, lits, role))

    @classmethod
    def of(cls, nt, signature: Signature) -> "CompiledTBox":
        axioms = nt.axioms if isinstance(nt, NormalizedTBox) else nt
        return cls(axioms, signature)

    # -- shared helpers

    def _augment(self, concepts: np.ndarray) -> np.ndarray:
        d = concepts.shape[1]
        return np.vstack([concepts, np.zeros((1, d)), np.ones((1, d))])

    def _check(self, concepts, roles):
        sig = self.signature
        n = len(sig.individuals)
        if concepts.shape != (len(sig.concepts), n) or roles.shape != (len(sig.roles), n, n):
            raise ShapeMismatch(
                f"tables of shape {concepts.shape}/{roles.shape} do not match the compiled signature"
            )

    # -- hierarchical loss

    def hierarchical(self, concepts: np.ndarray, roles: np.ndarray):
        """Mean over axioms of the summed pointwise violation ``max(0, lhs - rhs)``."""
        self._check(concepts, roles)
        xa = self._augment(concepts)
        gxa = np.zeros_like(xa)
        gr = np.zeros_like(roles)
        total = 0.0
        if self.n_axioms == 0 or concepts.shape[1] == 0:
            return 0.0, gxa[:-2], gr
        for grp in self.groups:
            L = grp.lits
            f = grp.form
            if f == 1:
                lhs, rhs = L["a"].value(xa), L["b"].value(xa)
            elif f == 2:
                a1, a2 = L["a1"].value(xa), L["a2"].value(xa)
                first = a1 <= a2
                lhs, rhs = np.where(first, a1, a2), L["b"].value(xa)
            elif f == 3:
                b1, b2 = L["b1"].value(xa), L["b2"].value(xa)
                first = b1 >= b2
                lhs, rhs = L["a"].value(xa), np.where(first, b1, b2)
            elif f in (4, 5):
                lhs = L["a"].value(xa)
                fill = L["f"].value(xa)
                rhs, route = _quantifier(f == 4, roles[grp.role], fill)
            else:
                fill = L["f"].value(xa)
                lhs, route = _quantifier(f == 6, roles[grp.role], fill)
                rhs = L["b"].value(xa)
            diff = lhs - rhs
            active = diff > 0.0
            total += float(np.sum(diff[active]))
            g_lhs = active.astype(float)
            g_rhs = -g_lhs
            if f == 1:
                L["a"].backward(g_lhs, gxa)
                L["b"].backward(g_rhs, gxa)
            elif f == 2:
                L["a1"].backward(np.where(first, g_lhs, 0.0), gxa)
                L["a2"].backward(np.where(first, 0.0, g_lhs), gxa)
                L["b"].backward(g_rhs, gxa)
            elif f == 3:
                L["a"].backward(g_lhs, gxa)
                L["b1"].backward(np.where(first, g_rhs, 0.0), gxa)
                L["b2"].backward(np.where(first, 0.0, g_rhs), gxa)
            elif f in (4, 5):
                L["a"].backward(g_lhs, gxa)
                route(g_rhs, L["f"], grp.role, gxa, gr)
            else:
                route(g_lhs, L["f"], grp.role, gxa, gr)
                L["b"].backward(g_rhs, gxa)
        scale = 1.0 / self.n_axioms
        return total * scale, gxa[:-2] * scale, gr * scale

    # -- rule-based loss

    def rule_weights(
        self,
        concepts: np.ndarray,
        roles: np.ndarray,
        alpha_prime: float = 0.8,
        tnorm: str = "product",
        clamp: bool = True,
    ) -> list[dict]:
        """The detached ``G`` products of every rule term, one dict per form group.

        Keys name the operand each weight multiplies: ``"b"`` for the
        ``1 - B`` factor, ``"a"``/``"f"`` likewise, ``"r"`` for ``1 - r``.
        """
        self._check(concepts, roles)
        tn = _tnorm(tnorm)
        xa = self._augment(concepts)
        ap = alpha_prime
        out = []
        for grp in self.groups:
            L = grp.lits
            f = grp.form
            w = {}
            if f in (1, 2, 3):
                if f == 2:
                    lhs = np.minimum(L["a1"].value(xa), L["a2"].value(xa))
                else:
                    lhs = L["a"].value(xa)
                if f == 3:
                    rhs = np.maximum(L["b1"].value(xa), L["b2"].value(xa))
                else:
                    rhs = L["b"].value(xa)
                w["b"] = _hinge(lhs - rhs)
            elif f in (4, 5):
                a = L["a"].value(xa)
                fill = L["f"].value(xa)
                r = roles[grp.role]
                # evidence that s is in the filler: Σ_x a(x) ⊗ r(x, s)
                ev = _evidence(tn(a[:, :, None], r).sum(axis=1), clamp)
                w["f"] = _hinge(ap - fill) * _hinge(ev - ap)
                if f == 4:
                    # r(s, x) is owed wherever a(s) ⊗ f(x) exceeds it
                    w["r"] = _hinge(tn(a[:, :, None], fill[:, None, :]) - r)
            else:
                fill = L["f"].value(xa)
                b = L["b"].value(xa)
                r = roles[grp.role]
                ev = _evidence(tn(r, fill[:, None, :]).sum(axis=2), clamp)
                w["b"] = _hinge(ap - b) * _hinge(ev - ap)
                if f == 7:
                    ev_back = _evidence(tn(b[:, :, None], r).sum(axis=1), clamp)
                    w["f"] = _hinge(ap - fill) * _hinge(ev_back - ap)
            out.append(w)
        return out

    def rule(self, concepts: np.ndarray, roles: np.ndarray, weights: list[dict]):
        """Loss ``Σ weight * (1 - target)`` and its gradient for fixed ``weights``."""
        self._check(concepts, roles)
        xa = self._augment(concepts)
        gxa = np.zeros_like(xa)
        gr = np.zeros_like(roles)
        total = 0.0
        for grp, w in zip(self.groups, weights):
            L = grp.lits
            for key, weight in w.items():
                if key == "r":
                    r = roles[grp.role]
                    total += float(np.sum(weight * (1.0 - r)))
                    np.add.at(gr, grp.role, -weight)
                elif key == "b" and grp.form == 3:
                    b1, b2 = L["b1"].value(xa), L["b2"].value(xa)
                    first = b1 >= b2
                    total += float(np.sum(weight * (1.0 - np.where(first, b1, b2))))
                    L["b1"].backward(np.where(first, -weight, 0.0), gxa)
                    L["b2"].backward(np.where(first, 0.0, -weight), gxa)
                else:
                    v = L[key].value(xa)
                    total += float(np.sum(weight * (1.0 - v)))
                    L[key].backward(-weight, gxa)
        return total, gxa[:-2], gr


def _tnorm(name: str):
    if name == "product":
        return np.multiply
    if name == "godel":
        return np.minimum
    raise ValueError(f"unknown t-norm {name!r}")


def _evidence(x: np.ndarray, clamp: bool) -> np.ndarray:
    return np.clip(x, 0.0, 1.0) if clamp else x


def _quantifier(existential: bool, r: np.ndarray, fill: np.ndarray):
    """Value of ∃r.f (sup-min) or ∀r.f (inf-max) per axiom and individual, plus its backward."""
    k, d, _ = r.shape
    fb = fill[:, None, :]
    if existential:
        via_role = r <= fb
        pairs = np.where(via_role, r, fb)
        best = pairs.argmax(axis=2)
    else:
        neg_r = 1.0 - r
        via_role = neg_r >= fb
        pairs = np.where(via_role, neg_r, fb)
        best = pairs.argmin(axis=2)
    kk, aa = np.arange(k)[:, None], np.arange(d)[None, :]
    value = pairs[kk, aa, best]
    to_role = via_role[kk, aa, best]
    sign = 1.0 if existential else -1.0

    def backward(g, fill_lits: _Lits, role_rows, gxa, gr):
        ki, ai = np.nonzero(to_role)
        np.add.at(gr, (role_rows[ki], ai, best[ki, ai]), sign * g[ki, ai])
        ki, ai = np.nonzero(~to_role)
        gf = np.zeros_like(fill)
        np.add.at(gf, (ki, best[ki, ai]), g[ki, ai])
        fill_lits.backward(gf, gxa)

    return value, backward


# -- public API ----------------------------------------------------------------


def _compiled(g: Grounding, nt) -> CompiledTBox:
    return CompiledTBox.of(nt, g.signature)


def hierarchical_loss(g: Grounding, nt) -> tuple[float, GradientSet]:
    loss, gc, gr = _compiled(g, nt).hierarchical(np.asarray(g.concepts), np.asarray(g.roles))
    return loss, GradientSet(gc, gr)


def rule_loss(g: Grounding, nt, cfg=None) -> tuple[float, GradientSet]:
    from .train import TrainConfig

    cfg = cfg or TrainConfig(loss_kind="rule")
    comp = _compiled(g, nt)
    c, r = np.asarray(g.concepts), np.asarray(g.roles)
    weights = comp.rule_weights(c, r, cfg.alpha_prime, cfg.tnorm, cfg.clamp_evidence)
    loss, gc, gr = comp.rule(c, r, weights)
    return loss, GradientSet(gc, gr)
