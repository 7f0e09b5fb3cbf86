# SPDX-License-Identifier: MIT
"""
Differentiable operations.

Shapes are checked at every boundary. Broadcasting is limited to what the ViT
forward pass needs: a right-aligned operand (bias, positional table, class token)
expanded over leading axes, whose gradient is summed back onto its own shape.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Final

import numpy as np
import numpy.typing as npt

from lungvit.errors import LabelError
from lungvit.errors import NonFiniteError
from lungvit.errors import ShapeError
from lungvit.tensor.tensor import Array
from lungvit.tensor.tensor import Tensor

GELU_COEFF: Final = math.sqrt(2.0 / math.pi)
GELU_CUBIC: Final = 0.044715
LAYER_NORM_EPS: Final = 1e-12


def as_tensor(value: Tensor | float | Array) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum ``grad`` down to ``shape`` (inverse of right-aligned broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, size in enumerate(shape) if size == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


# ---------------------------------------------------------------------------
# Elementwise
# ---------------------------------------------------------------------------


def add(a: Tensor | float, b: Tensor | float) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def rule(g: Array) -> tuple[Array, Array]:
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor._from_op(a.data + b.data, "add", (a, b), rule)


def sub(a: Tensor | float, b: Tensor | float) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def rule(g: Array) -> tuple[Array, Array]:
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor._from_op(a.data - b.data, "sub", (a, b), rule)


def mul(a: Tensor | float, b: Tensor | float) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def rule(g: Array) -> tuple[Array, Array]:
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor._from_op(a.data * b.data, "mul", (a, b), rule)


def scale(a: Tensor, factor: float) -> Tensor:
    def rule(g: Array) -> tuple[Array]:
        return (g * factor,)

    return Tensor._from_op(a.data * factor, "scale", (a,), rule)


def gelu(x: Tensor) -> Tensor:
    """``x * Phi(x)`` with the tanh approximation."""
    v = x.data
    inner = GELU_COEFF * (v + GELU_CUBIC * v**3)
    t = np.tanh(inner)

    def rule(g: Array) -> tuple[Array]:
        d_inner = GELU_COEFF * (1.0 + 3.0 * GELU_CUBIC * v**2)
        return (g * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t**2) * d_inner),)

    return Tensor._from_op(0.5 * v * (1.0 + t), "gelu", (x,), rule)


def dropout(x: Tensor, rate: float, rng: np.random.Generator | None) -> Tensor:
    """Inverted dropout; identity when ``rate`` is 0 or no generator is given."""
    if rate <= 0.0 or rng is None:
        return x
    if rate >= 1.0:
        raise ValueError(f"dropout rate must be < 1, got {rate}")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def rule(g: Array) -> tuple[Array]:
        return (g * mask,)

    return Tensor._from_op(x.data * mask, "dropout", (x,), rule)


# ---------------------------------------------------------------------------
# Linear algebra and layout
# ---------------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    ``(..., m, k) @ (k, n)`` or ``(..., m, k) @ (..., k, n)`` with equal leading axes.
    """
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    if b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise ShapeError(f"matmul: batch axes differ between {a.shape} and {b.shape}")

    def rule(g: Array) -> tuple[Array, Array]:
        grad_a = g @ np.swapaxes(b.data, -1, -2)
        grad_b = np.swapaxes(a.data, -1, -2) @ g
        return grad_a, _unbroadcast(grad_b, b.shape)

    return Tensor._from_op(a.data @ b.data, "matmul", (a, b), rule)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    target = tuple(int(s) for s in shape)
    try:
        out = a.data.reshape(target)
    except ValueError:
        raise ShapeError(f"reshape: cannot view {a.shape} as {target}") from None

    def rule(g: Array) -> tuple[Array]:
        return (g.reshape(a.shape),)

    return Tensor._from_op(out, "reshape", (a,), rule)


def permute(a: Tensor, axes: Sequence[int]) -> Tensor:
    order = tuple(int(i) for i in axes)
    if sorted(order) != list(range(a.ndim)):
        raise ShapeError(f"permute: {order} is not a permutation of {a.ndim} axes")
    inverse = tuple(int(i) for i in np.argsort(order))

    def rule(g: Array) -> tuple[Array]:
        return (np.transpose(g, inverse),)

    return Tensor._from_op(np.transpose(a.data, order), "permute", (a,), rule)


def transpose(a: Tensor, axis1: int = -2, axis2: int = -1) -> Tensor:
    order = list(range(a.ndim))
    order[axis1], order[axis2] = order[axis2], order[axis1]
    return permute(a, order)


def slice_axis(a: Tensor, start: int, stop: int, axis: int) -> Tensor:
    axis = axis % a.ndim
    if not 0 <= start < stop <= a.shape[axis]:
        raise ShapeError(f"slice_axis: [{start}:{stop}] out of range for axis of {a.shape[axis]}")
    index = (slice(None),) * axis + (slice(start, stop),)

    def rule(g: Array) -> tuple[Array]:
        grad = np.zeros_like(a.data)
        grad[index] = g
        return (grad,)

    return Tensor._from_op(a.data[index], "slice", (a,), rule)


def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    if not tensors:
        raise ShapeError("concat: nothing to concatenate")
    axis = axis % tensors[0].ndim
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        shapes = [t.shape for t in tensors]
        raise ShapeError(f"concat: incompatible shapes {shapes} on axis {axis}") from None
    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def rule(g: Array) -> tuple[Array, ...]:
        return tuple(
            np.take(g, np.arange(lo, hi), axis=axis) for lo, hi in zip(bounds[:-1], bounds[1:])
        )

    return Tensor._from_op(out, "concat", tuple(tensors), rule)


# ---------------------------------------------------------------------------
# Reductions and normalizations
# ---------------------------------------------------------------------------


def sum(a: Tensor) -> Tensor:  # noqa: A001
    def rule(g: Array) -> tuple[Array]:
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor._from_op(np.asarray(a.data.sum()), "sum", (a,), rule)


def mean(a: Tensor) -> Tensor:
    count = a.size

    def rule(g: Array) -> tuple[Array]:
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return Tensor._from_op(np.asarray(a.data.mean()), "mean", (a,), rule)


def _check_finite(op: str, x: Tensor) -> None:
    if not np.isfinite(x.data).all():
        raise NonFiniteError(f"{op}: input contains non-finite values")


def _softmax_array(v: Array) -> Array:
    shifted = v - v.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis, computed after max-subtraction."""
    _check_finite("softmax", x)
    s = _softmax_array(x.data)

    def rule(g: Array) -> tuple[Array]:
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return Tensor._from_op(s, "softmax", (x,), rule)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    d = x.shape[-1]
    if gamma.shape != (d,) or beta.shape != (d,):
        raise ShapeError(
            f"layer_norm: affine shapes {gamma.shape}/{beta.shape} do not match last axis {d}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv_std

    def rule(g: Array) -> tuple[Array, Array, Array]:
        dxhat = g * gamma.data
        grad_x = (inv_std / d) * (
            d * dxhat
            - dxhat.sum(axis=-1, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True)
        )
        lead = tuple(range(g.ndim - 1))
        return grad_x, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return Tensor._from_op(xhat * gamma.data + beta.data, "layer_norm", (x, gamma, beta), rule)


def cross_entropy(logits: Tensor, labels: Sequence[int] | npt.NDArray[np.int64]) -> Tensor:
    """Mean over the batch of ``-log softmax(logits)[label]``."""
    if logits.ndim != 2:
        raise ShapeError(f"cross_entropy: logits must be (batch, classes), got {logits.shape}")
    batch, classes = logits.shape
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    if targets.shape != (batch,):
        raise ShapeError(f"cross_entropy: {targets.size} labels for a batch of {batch}")
    bad = targets[(targets < 0) | (targets >= classes)]
    if bad.size:
        raise LabelError(f"cross_entropy: label {int(bad[0])} outside [0, {classes})")

    v = logits.data
    shifted = v - v.max(axis=-1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(batch)
    loss = -log_probs[rows, targets].mean()

    def rule(g: Array) -> tuple[Array]:
        grad = np.exp(log_probs)
        grad[rows, targets] -= 1.0
        return (grad * (g / batch),)

    return Tensor._from_op(np.asarray(loss), "cross_entropy", (logits,), rule)
