"""Reverse-mode automatic differentiation over dense numpy arrays.

A :class:`Tensor` wraps an ndarray; operations record parent links and a
vector-Jacobian closure, forming an implicit acyclic tape. ``backward``
walks the tape once in reverse topological order and accumulates gradients
into every reachable tensor with ``requires_grad``.

Supported precisions are float32 and float64; every op preserves the dtype
of its inputs.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from ..errors import DimensionError, NumericError

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable tape construction inside the block (inference mode)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "op", "parents", "vjp", "name")

    def __init__(self, data, requires_grad=False, op="leaf", parents=(), vjp=None,
                 name=None):
        if not isinstance(data, np.ndarray):
            data = np.asarray(data, dtype=np.float64)
        self.data = data
        self.grad = None
        self.requires_grad = requires_grad
        self.op = op
        self.parents = parents
        self.vjp = vjp
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(op={self.op!r}, shape={self.data.shape}{tag})"


def parameter(data, name=None) -> Tensor:
    return Tensor(np.asarray(data), requires_grad=True, name=name)


def constant(data, dtype=None) -> Tensor:
    arr = np.asarray(data, dtype=dtype) if dtype is not None else np.asarray(data)
    return Tensor(arr, requires_grad=False)


def _node(data, op, parents, vjp) -> Tensor:
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, op=op, parents=tuple(parents), vjp=vjp)
    return Tensor(data, requires_grad=False, op=op)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Reduce a broadcast gradient back to the original operand shape."""
    if grad.shape == tuple(shape):
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(
        i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1
    )
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# forward ops


def add(a: Tensor, b: Tensor) -> Tensor:
    data = a.data + b.data

    def vjp(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _node(data, "add", (a, b), vjp)


def mul(a: Tensor, b: Tensor) -> Tensor:
    data = a.data * b.data

    def vjp(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return _node(data, "mul", (a, b), vjp)


def scale(a: Tensor, c: float) -> Tensor:
    data = a.data * a.data.dtype.type(c)

    def vjp(g):
        return (g * a.data.dtype.type(c),)

    return _node(data, "scale", (a,), vjp)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    ad, bd = a.data, b.data
    if ad.ndim < 2 or bd.ndim < 2:
        raise DimensionError(
            f"matmul needs >=2-d operands, got {ad.shape} @ {bd.shape}"
        )
    if ad.shape[-1] != bd.shape[-2]:
        raise DimensionError(f"matmul inner mismatch: {ad.shape} @ {bd.shape}")
    if bd.ndim == 2:
        data = ad @ bd

        def vjp(g):
            ga = g @ bd.T
            gb = ad.reshape(-1, ad.shape[-1]).T @ g.reshape(-1, g.shape[-1])
            return ga, gb

    elif ad.ndim == bd.ndim and ad.shape[:-2] == bd.shape[:-2]:
        data = ad @ bd

        def vjp(g):
            ga = g @ np.swapaxes(bd, -1, -2)
            gb = np.swapaxes(ad, -1, -2) @ g
            return ga, gb

    else:
        raise DimensionError(
            f"unsupported matmul batching: {ad.shape} @ {bd.shape}"
        )
    return _node(data, "matmul", (a, b), vjp)


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    return add(matmul(x, w), b)


def relu(x: Tensor) -> Tensor:
    keep = x.data > 0
    data = np.where(keep, x.data, x.data.dtype.type(0))

    def vjp(g):
        return (g * keep,)

    return _node(data, "relu", (x,), vjp)


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis, stabilized by max subtraction."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)

    def vjp(g):
        inner = (g * y).sum(axis=-1, keepdims=True)
        return (y * (g - inner),)

    return _node(y, "softmax", (x,), vjp)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    xd = x.data
    mu = xd.mean(axis=-1, keepdims=True)
    xc = xd - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + xd.dtype.type(eps))
    xhat = xc * inv
    data = xhat * gain.data + bias.data
    n = xd.shape[-1]

    def vjp(g):
        dgain = _unbroadcast(g * xhat, gain.data.shape)
        dbias = _unbroadcast(g, bias.data.shape)
        dxhat = g * gain.data
        term = dxhat.sum(axis=-1, keepdims=True)
        term2 = (dxhat * xhat).sum(axis=-1, keepdims=True)
        dx = (inv / n) * (n * dxhat - term - xhat * term2)
        return dx, dgain, dbias

    return _node(data, "layer_norm", (x, gain, bias), vjp)


def embedding_lookup(table: Tensor, idx: np.ndarray) -> Tensor:
    idx = np.asarray(idx)
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise DimensionError(
            f"embedding index out of range for table of {table.data.shape[0]} rows"
        )
    data = table.data[idx]

    def vjp(g):
        dt = np.zeros_like(table.data)
        np.add.at(dt, idx.reshape(-1), g.reshape(-1, table.data.shape[1]))
        return (dt,)

    return _node(data, "embedding_lookup", (table,), vjp)


def reshape(x: Tensor, shape) -> Tensor:
    orig = x.data.shape
    data = x.data.reshape(shape)

    def vjp(g):
        return (g.reshape(orig),)

    return _node(data, "reshape", (x,), vjp)


def flatten(x: Tensor) -> Tensor:
    return reshape(x, (-1,))


def transpose(x: Tensor, axes) -> Tensor:
    axes = tuple(axes)
    data = np.transpose(x.data, axes)
    inverse = tuple(np.argsort(axes))

    def vjp(g):
        return (np.transpose(g, inverse),)

    return _node(data, "transpose", (x,), vjp)


def mean_all(x: Tensor) -> Tensor:
    data = np.asarray(x.data.mean())
    size = x.data.size

    def vjp(g):
        return (np.full_like(x.data, g / size),)

    return _node(data, "mean_all", (x,), vjp)


def sum_all(x: Tensor) -> Tensor:
    data = np.asarray(x.data.sum())

    def vjp(g):
        return (np.full_like(x.data, g),)

    return _node(data, "sum_all", (x,), vjp)


# ---------------------------------------------------------------------------
# losses


def cross_entropy(logits: Tensor, targets: np.ndarray, position_mask: np.ndarray) -> Tensor:
    """Mean negative log-likelihood over the masked positions only.

    ``logits`` is [N, V]; ``targets`` gives a class per row; rows where
    ``position_mask`` is false do not contribute.
    """
    x = logits.data
    if x.ndim != 2:
        raise DimensionError(f"cross_entropy expects [N, V] logits, got {x.shape}")
    targets = np.asarray(targets, dtype=np.int64)
    mask = np.asarray(position_mask, dtype=bool)
    if targets.shape != (x.shape[0],) or mask.shape != (x.shape[0],):
        raise DimensionError(
            f"targets/mask of shapes {targets.shape}/{mask.shape} do not match "
            f"logits {x.shape}"
        )
    count = int(mask.sum())
    if count == 0:
        raise NumericError("cross_entropy needs at least one active position")
    if targets.min() < 0 or targets.max() >= x.shape[1]:
        raise DimensionError("cross_entropy target index out of range")

    m = x.max(axis=-1, keepdims=True)
    z = x - m
    lse = np.log(np.exp(z).sum(axis=-1)) + m[:, 0]
    picked = x[np.arange(x.shape[0]), targets]
    per_row = lse - picked
    loss = np.asarray((per_row * mask).sum() / count, dtype=x.dtype)

    def vjp(g):
        e = np.exp(z)
        p = e / e.sum(axis=-1, keepdims=True)
        p[np.arange(x.shape[0]), targets] -= 1
        w = (mask / count).astype(x.dtype)
        return (g * p * w[:, None],)

    return _node(loss, "cross_entropy", (logits,), vjp)


def mse_mean(pred: Tensor, target: np.ndarray) -> Tensor:
    """Mean squared error over all entries of equally-shaped arrays."""
    t = np.asarray(target, dtype=pred.data.dtype)
    if t.shape != pred.data.shape:
        raise DimensionError(
            f"mse_mean shape mismatch: {pred.data.shape} vs {t.shape}"
        )
    diff = pred.data - t
    loss = np.asarray((diff * diff).mean(), dtype=pred.data.dtype)

    def vjp(g):
        return (g * (2.0 / diff.size) * diff,)

    return _node(loss, "mse_mean", (pred,), vjp)


# ---------------------------------------------------------------------------
# backward pass


def graph_nodes(root: Tensor) -> list:
    """Operation records reachable from ``root``, parents first."""
    visited = set()
    order = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate ``grad`` on every tensor reachable from a scalar loss."""
    if loss.data.size != 1:
        raise NumericError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    order = graph_nodes(loss)
    for node in order:
        node.grad = None
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node.vjp is None or node.grad is None:
            continue
        grads = node.vjp(node.grad)
        for parent, g in zip(node.parents, grads):
            if g is None or not parent.requires_grad:
                continue
            if parent.grad is None:
                parent.grad = g
            else:
                parent.grad = parent.grad + g


def collect_grads(params: dict) -> dict:
    """Gradients per named parameter; parameters off the graph get zeros."""
    return {
        name: (p.grad if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }
