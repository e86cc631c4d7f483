"""Tape-based reverse-mode autodiff with forward-mode tangents.

A Tensor wraps a float64 ndarray.  Operations on Tensors record their
parents and a backward closure; ``backward()`` on a scalar loss walks the
tape in reverse topological order and accumulates into ``.grad`` buffers
(repeated backward calls accumulate until ``zero_grad``).

Forward-mode derivatives ride along the same operations: when any input
carries a ``.tangent`` array, the output's tangent is computed eagerly by
the operation's linearization.  ``jvp`` wires inputs up with seed tangents
and reads the output tangent, giving exact directional derivatives.

Scope is deliberately small: the elementwise/matmul/reduction vocabulary
the networks in this repo need, with broadcasting limited to what numpy
does for those shapes.  No GPU, no sparse tensors.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .. import kernels

Array = np.ndarray


def _asarray(x) -> Array:
    return np.asarray(x, dtype=np.float64)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "tangent",
                 "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False):
        self.data = _asarray(data)
        self.grad: Array | None = None
        self.requires_grad = requires_grad
        self.tangent: Array | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn: Callable[[Array], None] | None = None

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        flags = []
        if self.requires_grad:
            flags.append("grad")
        if self.tangent is not None:
            flags.append("tangent")
        tag = f" [{','.join(flags)}]" if flags else ""
        return f"Tensor(shape={self.data.shape}{tag})"

    # -- tape ------------------------------------------------------------------

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g: Array):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        """Reverse sweep from a scalar; accumulates into ``.grad`` buffers."""
        if self.data.size != 1:
            raise ValueError(
                f"backward() needs a scalar, got shape {self.data.shape}")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen and parent.requires_grad:
                    stack.append((parent, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn(node.grad)

    def detach(self) -> "Tensor":
        """Stop-gradient: same values, no tape history, no tangent."""
        return Tensor(self.data)

    # -- operator sugar ---------------------------------------------------------

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

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent):
        return power(self, exponent)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])


def astensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def parameter(data) -> Tensor:
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)


def stop_gradient(x: Tensor) -> Tensor:
    return astensor(x).detach()


# -- op construction ----------------------------------------------------------


def _make(data: Array, parents: Sequence[Tensor],
          backward: Callable[[Array], None] | None,
          tangent: Array | None) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward_fn = backward
    out.tangent = tangent
    return out


def _unbroadcast(g: Array, shape: tuple) -> Array:
    """Reduce a broadcast gradient back to ``shape``."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _tan(x: Tensor) -> Array | None:
    return x.tangent


# -- arithmetic ---------------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = astensor(a), astensor(b)
    data = a.data + b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.data.shape))

    tangent = None
    if a.tangent is not None or b.tangent is not None:
        ta = a.tangent if a.tangent is not None else 0.0
        tb = b.tangent if b.tangent is not None else 0.0
        tangent = np.broadcast_to(ta + tb, data.shape).astype(np.float64)
    return _make(data, (a, b), backward, tangent)


def sub(a, b) -> Tensor:
    a, b = astensor(a), astensor(b)
    data = a.data - b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g, b.data.shape))

    tangent = None
    if a.tangent is not None or b.tangent is not None:
        ta = a.tangent if a.tangent is not None else 0.0
        tb = b.tangent if b.tangent is not None else 0.0
        tangent = np.broadcast_to(ta - tb, data.shape).astype(np.float64)
    return _make(data, (a, b), backward, tangent)


def mul(a, b) -> Tensor:
    a, b = astensor(a), astensor(b)
    data = a.data * b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    tangent = None
    if a.tangent is not None or b.tangent is not None:
        t = 0.0
        if a.tangent is not None:
            t = a.tangent * b.data
        if b.tangent is not None:
            t = t + a.data * b.tangent
        tangent = np.broadcast_to(t, data.shape).astype(np.float64)
    return _make(data, (a, b), backward, tangent)


def div(a, b) -> Tensor:
    a, b = astensor(a), astensor(b)
    data = a.data / b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g / b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g * a.data / (b.data * b.data),
                                       b.data.shape))

    tangent = None
    if a.tangent is not None or b.tangent is not None:
        t = 0.0
        if a.tangent is not None:
            t = a.tangent / b.data
        if b.tangent is not None:
            t = t - a.data * b.tangent / (b.data * b.data)
        tangent = np.broadcast_to(t, data.shape).astype(np.float64)
    return _make(data, (a, b), backward, tangent)


def neg(a) -> Tensor:
    a = astensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(-g)

    tangent = None if a.tangent is None else -a.tangent
    return _make(-a.data, (a,), backward, tangent)


def power(a, exponent: float) -> Tensor:
    a = astensor(a)
    exponent = float(exponent)
    data = a.data ** exponent

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * exponent * a.data ** (exponent - 1.0))

    tangent = None
    if a.tangent is not None:
        tangent = a.tangent * exponent * a.data ** (exponent - 1.0)
    return _make(data, (a,), backward, tangent)


def matmul(a, b) -> Tensor:
    a, b = astensor(a), astensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    data = a.data @ b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(g @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ g)

    tangent = None
    if a.tangent is not None or b.tangent is not None:
        t = 0.0
        if a.tangent is not None:
            t = a.tangent @ b.data
        if b.tangent is not None:
            t = t + a.data @ b.tangent
        tangent = t
    return _make(data, (a, b), backward, tangent)


# -- reductions / shape -------------------------------------------------------


def tsum(a, axis=None, keepdims=False) -> Tensor:
    a = astensor(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if not a.requires_grad:
            return
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        a._accumulate(np.broadcast_to(g, a.data.shape).copy())

    tangent = None
    if a.tangent is not None:
        tangent = a.tangent.sum(axis=axis, keepdims=keepdims)
    return _make(data, (a,), backward, tangent)


def tmean(a, axis=None, keepdims=False) -> Tensor:
    a = astensor(a)
    data = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.data.size / data.size

    def backward(g):
        if not a.requires_grad:
            return
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        a._accumulate(np.broadcast_to(g / count, a.data.shape).copy())

    tangent = None
    if a.tangent is not None:
        tangent = a.tangent.mean(axis=axis, keepdims=keepdims)
    return _make(data, (a,), backward, tangent)


def reshape(a, shape) -> Tensor:
    a = astensor(a)
    data = a.data.reshape(shape)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.reshape(a.data.shape))

    tangent = None if a.tangent is None else a.tangent.reshape(shape)
    return _make(data, (a,), backward, tangent)


def concat(parts: Iterable[Tensor], axis: int = -1) -> Tensor:
    parts = [astensor(p) for p in parts]
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        slabs = np.split(g, offsets[1:-1], axis=axis)
        for p, slab in zip(parts, slabs):
            if p.requires_grad:
                p._accumulate(slab)

    tangent = None
    if any(p.tangent is not None for p in parts):
        tangent = np.concatenate(
            [p.tangent if p.tangent is not None else np.zeros_like(p.data)
             for p in parts], axis=axis)
    return _make(data, tuple(parts), backward, tangent)


# -- elementwise nonlinearities -----------------------------------------------


def _unary(a, data: Array, local: Array, parents=None) -> Tensor:
    """Common case: out = f(a) with elementwise derivative ``local``."""

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * local)

    tangent = None if a.tangent is None else a.tangent * local
    return _make(data, parents or (a,), backward, tangent)


def exp(a) -> Tensor:
    a = astensor(a)
    data = np.exp(a.data)
    return _unary(a, data, data)


def log(a) -> Tensor:
    a = astensor(a)
    return _unary(a, np.log(a.data), 1.0 / a.data)


def sqrt(a) -> Tensor:
    a = astensor(a)
    data = np.sqrt(a.data)
    return _unary(a, data, 0.5 / data)


def tanh(a) -> Tensor:
    a = astensor(a)
    data = np.tanh(a.data)
    return _unary(a, data, 1.0 - data * data)


def sin(a) -> Tensor:
    a = astensor(a)
    return _unary(a, np.sin(a.data), np.cos(a.data))


def cos(a) -> Tensor:
    a = astensor(a)
    return _unary(a, np.cos(a.data), -np.sin(a.data))


def relu(a) -> Tensor:
    a = astensor(a)
    data = np.maximum(a.data, 0.0)
    return _unary(a, data, (a.data > 0.0).astype(np.float64))


def mish(a) -> Tensor:
    a = astensor(a)
    if a.requires_grad or a.tangent is not None:
        data, deriv = kernels.mish_with_deriv(a.data)
        return _unary(a, data, deriv)
    return _make(kernels.mish(a.data), (a,), None, None)


def square(a) -> Tensor:
    a = astensor(a)
    return mul(a, a)


# -- forward mode ---------------------------------------------------------------


def jvp(f, xs, vs):
    """Evaluate ``f`` at ``xs`` with exact directional derivative along ``vs``.

    ``xs``/``vs`` are matching tuples (or single arrays); returns
    ``(f(xs...), D_v f)`` as ndarrays.  The derivative is forward-mode,
    not a finite difference.
    """
    single = not isinstance(xs, (tuple, list))
    if single:
        xs, vs = (xs,), (vs,)
    if len(xs) != len(vs):
        raise ValueError("jvp: inputs and tangents must pair up")
    wrapped = []
    for x, v in zip(xs, vs):
        t = astensor(x)
        t = Tensor(t.data)
        tan = _asarray(v)
        if tan.shape != t.data.shape:
            raise ValueError(
                f"jvp: tangent shape {tan.shape} != input shape {t.data.shape}")
        t.tangent = tan
        wrapped.append(t)
    out = f(*wrapped)
    if not isinstance(out, Tensor):
        raise TypeError("jvp: f must return a Tensor")
    tangent = out.tangent
    if tangent is None:
        tangent = np.zeros_like(out.data)
    return out.data, tangent
