"""Scalar reverse-mode differentiation.

Small and slow on purpose: it spells each loss out term by term, which makes
it a readable cross-check for the vectorized gradients in
:mod:`dfalc.losses`, and it gives the detached hinge a concrete meaning.
"""

from __future__ import annotations


class Value:
    __slots__ = ("data", "grad", "_parents")

    def __init__(self, data: float, parents=()):
        self.data = float(data)
        self.grad = 0.0
        # (parent, local derivative) pairs
        self._parents = parents

    def __repr__(self):
        return f"Value({self.data!r})"

    def __add__(self, other):
        other = _lift(other)
        return Value(self.data + other.data, ((self, 1.0), (other, 1.0)))

    __radd__ = __add__

    def __neg__(self):
        return Value(-self.data, ((self, -1.0),))

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) + (-self)

    def __mul__(self, other):
        other = _lift(other)
        return Value(self.data * other.data, ((self, other.data), (other, self.data)))

    __rmul__ = __mul__

    def backward(self) -> None:
        order: list[Value] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p, _ in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        for node in order:
            node.grad = 0.0
        self.grad = 1.0
        for node in reversed(order):
            for p, local in node._parents:
                p.grad += local * node.grad


def _lift(x) -> Value:
    return x if isinstance(x, Value) else Value(x)


def const(x) -> Value:
    """A leaf that gradients never flow through."""
    return Value(x.data if isinstance(x, Value) else x)


def vmin(a, b) -> Value:
    """min routing the gradient to ``a`` on ties."""
    a, b = _lift(a), _lift(b)
    return Value(a.data, ((a, 1.0),)) if a.data <= b.data else Value(b.data, ((b, 1.0),))


def vmax(a, b) -> Value:
    """max routing the gradient to ``a`` on ties."""
    a, b = _lift(a), _lift(b)
    return Value(a.data, ((a, 1.0),)) if a.data >= b.data else Value(b.data, ((b, 1.0),))


def relu(x) -> Value:
    x = _lift(x)
    return Value(x.data, ((x, 1.0),)) if x.data > 0.0 else Value(0.0)


def detached_hinge(v, w):
    """``max(0, v - w)`` as a constant: no gradient reaches ``v`` or ``w``."""
    if isinstance(v, Value) or isinstance(w, Value):
        return const(max(0.0, _lift(v).data - _lift(w).data))
    return max(0.0, v - w)
