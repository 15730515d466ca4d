"""Reverse-mode automatic differentiation over scalars and 1-d arrays.

The log densities in this package compose a small set of primitives
(elementwise math, reductions, products with constant lag matrices, and
linear recursions), so gradient support is a compact tape rather than a
framework.  Every public function accepts plain numbers/arrays as well as
:class:`Node` values and dispatches accordingly, which lets the model code
be written once and evaluated with or without gradient tracking.

Scalars are represented as Python floats, vectors as 1-d float64 arrays.
Binary operations support scalar-scalar, vector-vector (equal length) and
scalar-vector broadcasting; nothing else is needed here.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np
from scipy.signal import lfilter
from scipy.special import expit

_COUNTER = itertools.count()


class Node:
    """One tape entry: a value plus vector-Jacobian callbacks to its parents."""

    __slots__ = ("value", "parents", "idx")

    # make numpy defer to the reflected operators instead of broadcasting
    __array_ufunc__ = None
    __array_priority__ = 1000

    def __init__(self, value, parents=()):
        self.value = value
        self.parents = parents
        self.idx = next(_COUNTER)

    # -- arithmetic sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __getitem__(self, key):
        return take(self, key)

    def __len__(self):
        return len(self.value)

    def __repr__(self):
        return f"Node({self.value!r})"


def is_node(x) -> bool:
    return isinstance(x, Node)


def value(x):
    """Underlying numeric value of ``x`` (identity for plain inputs)."""
    return x.value if isinstance(x, Node) else x


def _clean(v):
    """Normalise forward values: 0-d results become floats."""
    if isinstance(v, np.ndarray):
        if v.ndim == 0:
            return float(v)
        return v
    return float(v)


def _reduce_to(g, ref):
    """Collapse a broadcast gradient back to the shape of ``ref``."""
    if isinstance(ref, np.ndarray):
        return g if isinstance(g, np.ndarray) else np.full_like(ref, g)
    if isinstance(g, np.ndarray):
        return float(np.sum(g))
    return g


def _unary(x, fwd, make_vjp):
    xv = value(x)
    out = _clean(fwd(xv))
    if not isinstance(x, Node):
        return out
    vjp = make_vjp(xv, out)
    return Node(out, ((x, vjp),))


def _binary(a, b, fwd, vjp_a, vjp_b):
    av, bv = value(a), value(b)
    out = _clean(fwd(av, bv))
    parents = []
    if isinstance(a, Node):
        parents.append((a, lambda g, av=av, bv=bv: _reduce_to(vjp_a(g, av, bv), av)))
    if isinstance(b, Node):
        parents.append((b, lambda g, av=av, bv=bv: _reduce_to(vjp_b(g, av, bv), bv)))
    if not parents:
        return out
    return Node(out, tuple(parents))


# -- elementwise primitives ------------------------------------------------

def add(a, b):
    return _binary(a, b, lambda x, y: x + y, lambda g, x, y: g, lambda g, x, y: g)


def sub(a, b):
    return _binary(a, b, lambda x, y: x - y, lambda g, x, y: g, lambda g, x, y: -g)


def mul(a, b):
    return _binary(a, b, lambda x, y: x * y, lambda g, x, y: g * y, lambda g, x, y: g * x)


def div(a, b):
    return _binary(
        a, b, lambda x, y: x / y, lambda g, x, y: g / y, lambda g, x, y: -g * x / (y * y)
    )


def neg(x):
    return _unary(x, lambda v: -v, lambda xv, out: lambda g: -g)


def power(x, exponent):
    if isinstance(exponent, Node):
        raise TypeError("exponent must be a constant")
    e = float(exponent)
    return _unary(x, lambda v: v**e, lambda xv, out: lambda g: g * e * xv ** (e - 1.0))


def exp(x):
    return _unary(x, np.exp, lambda xv, out: lambda g: g * out)


def log(x):
    return _unary(x, np.log, lambda xv, out: lambda g: g / xv)


def log1p(x):
    return _unary(x, np.log1p, lambda xv, out: lambda g: g / (1.0 + xv))


def sqrt(x):
    return _unary(x, np.sqrt, lambda xv, out: lambda g: g * 0.5 / out)


def tanh(x):
    return _unary(x, np.tanh, lambda xv, out: lambda g: g * (1.0 - out * out))


def sigmoid(x):
    return _unary(x, expit, lambda xv, out: lambda g: g * out * (1.0 - out))


def square(x):
    return _unary(x, np.square, lambda xv, out: lambda g: g * 2.0 * xv)


# -- reductions and structure ------------------------------------------------

def total(x):
    """Sum of all elements (scalar)."""
    return _unary(
        x,
        lambda v: float(np.sum(v)),
        lambda xv, out: lambda g: (np.full_like(xv, g) if isinstance(xv, np.ndarray) else g),
    )


def matvec(a_const: np.ndarray, x):
    """``a_const @ x`` for a constant matrix and a (possibly traced) vector."""
    a_const = np.asarray(a_const, dtype=float)
    return _unary(x, lambda v: a_const @ v, lambda xv, out: lambda g: a_const.T @ g)


def inner(a, b):
    """Dot product of two vectors."""
    return _binary(a, b, lambda x, y: float(np.dot(x, y)), lambda g, x, y: g * y, lambda g, x, y: g * x)


def cumsum(x):
    return _unary(x, np.cumsum, lambda xv, out: lambda g: np.cumsum(g[::-1])[::-1])


def take(x, key):
    """Indexing/slicing into a vector node."""

    def make_vjp(xv, out):
        def vjp(g):
            full = np.zeros_like(xv)
            full[key] = g
            return full

        return vjp

    return _unary(x, lambda v: _clean(v[key]), make_vjp)


def concat(parts: Sequence):
    """Concatenate scalars/vectors (traced or constant) into one vector."""
    vals = [np.atleast_1d(np.asarray(value(p), dtype=float)) for p in parts]
    sizes = [v.size for v in vals]
    out = np.concatenate(vals)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    parents = []
    for part, off, size in zip(parts, offsets[:-1], sizes):
        if isinstance(part, Node):
            scalar = not isinstance(part.value, np.ndarray)

            def vjp(g, off=int(off), size=int(size), scalar=scalar):
                piece = g[off : off + size]
                return float(piece[0]) if scalar else piece

            parents.append((part, vjp))
    if not parents:
        return out
    return Node(out, tuple(parents))


def ar_filter(coefs, x):
    """Linear recursion ``s[t] = x[t] + sum_j coefs[j] * s[t-j-1]``.

    Presample values of ``s`` are zero.  ``coefs`` and ``x`` may each be
    traced.  Runs at C speed through an IIR filter, including both adjoint
    recursions.
    """
    w = np.atleast_1d(np.asarray(value(coefs), dtype=float))
    xv = np.asarray(value(x), dtype=float)
    if w.size == 0:
        return x
    den = np.concatenate([[1.0], -w])
    s = lfilter([1.0], den, xv)
    parents = []
    if isinstance(x, Node) or isinstance(coefs, Node):
        def xbar_of(g):
            # adjoint recursion: xbar[t] = g[t] + sum_j w[j] * xbar[t+j+1]
            return lfilter([1.0], den, g[::-1])[::-1]
    if isinstance(x, Node):
        parents.append((x, lambda g: xbar_of(g)))
    if isinstance(coefs, Node):
        def coef_vjp(g):
            xbar = xbar_of(g)
            gw = np.empty_like(w)
            for j in range(w.size):
                gw[j] = float(np.dot(xbar[j + 1 :], s[: s.size - j - 1]))
            return gw if isinstance(coefs.value, np.ndarray) else float(gw[0])

        parents.append((coefs, coef_vjp))
    if not parents:
        return s
    return Node(s, tuple(parents))


# -- backward pass -----------------------------------------------------------

def backward(out: Node, inputs: Sequence[Node]):
    """Gradients of scalar ``out`` with respect to each node in ``inputs``."""
    if not isinstance(out, Node):
        return [np.zeros_like(n.value) if isinstance(n.value, np.ndarray) else 0.0 for n in inputs]

    reachable = {}
    stack = [out]
    while stack:
        node = stack.pop()
        if node.idx in reachable:
            continue
        reachable[node.idx] = node
        for parent, _ in node.parents:
            if parent.idx not in reachable:
                stack.append(parent)

    grads: dict[int, object] = {out.idx: 1.0}
    for idx in sorted(reachable, reverse=True):
        node = reachable[idx]
        g = grads.pop(idx, None)
        if g is None:
            continue
        for parent, vjp in node.parents:
            contrib = vjp(g)
            existing = grads.get(parent.idx)
            grads[parent.idx] = contrib if existing is None else existing + contrib
        if node is not out and not node.parents:
            grads[idx] = g  # keep leaf gradients
    result = []
    for n in inputs:
        g = grads.get(n.idx)
        if g is None:
            g = np.zeros_like(n.value) if isinstance(n.value, np.ndarray) else 0.0
        result.append(g)
    return result


def value_and_grad(f: Callable[[Node], object], u: np.ndarray):
    """Evaluate ``f`` at ``u`` and return ``(value, gradient)``.

    ``f`` receives a traced copy of ``u`` and must return a scalar.  When the
    value is not finite the gradient is reported as ``None``.
    """
    u = np.asarray(u, dtype=float)
    root = Node(u.copy())
    out = f(root)
    v = float(value(out))
    if not np.isfinite(v):
        return v, None
    if not isinstance(out, Node):
        return v, np.zeros_like(u)
    (g,) = backward(out, [root])
    if not isinstance(g, np.ndarray):
        g = np.full_like(u, g)
    return v, g
