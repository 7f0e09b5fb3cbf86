# SPDX-License-Identifier: MIT
"""
Gradient-weighted attention relevancy.

Starting from ``R = I`` over tokens, every block (in order) contributes
``A_bar = clamp0(mean_heads(A * dlogit/dA))`` and updates ``R <- R + A_bar @ R``.
The map is the class-token row of ``R`` over the patch tokens, as a ``P x P`` grid.

Parameters are used through a detached view, so computing a map never touches
their gradients.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from lungvit.data import LabeledImage
from lungvit.data import normalize_pixels
from lungvit.data import resize_to_input
from lungvit.errors import InvalidClassError
from lungvit.errors import MissingTraceError
from lungvit.model import ForwardTrace
from lungvit.model import ViTParams
from lungvit.model import forward
from lungvit.tensor import Array
from lungvit.tensor import Tensor
from lungvit.tensor import backward
from lungvit.tensor import slice_axis

Method = Literal["relevancy", "gradcam"]
METHODS: tuple[Method, ...] = ("relevancy", "gradcam")


@dataclass(frozen=True, eq=False)
class RelevancyMap:
    grid: Array
    target_class: int
    source_id: str = ""
    method: Method = "relevancy"

    def __post_init__(self) -> None:
        if not np.isfinite(self.grid).all():
            raise ValueError("relevancy grid must be finite")
        if (self.grid < 0).any():
            raise ValueError("relevancy grid must be nonnegative")

    @property
    def grid_size(self) -> int:
        return int(self.grid.shape[0])

    def argmax(self) -> tuple[int, int]:
        row, col = np.unravel_index(int(np.argmax(self.grid)), self.grid.shape)
        return int(row), int(col)


def _model_pixels(params: ViTParams, image: LabeledImage | Array) -> tuple[Array, str]:
    if isinstance(image, LabeledImage):
        resized = resize_to_input(image, params.config.image_size)
        return normalize_pixels(resized.pixels), image.source_id
    return np.asarray(image, dtype=np.float64), ""


def _check_class(params: ViTParams, target_class: int) -> None:
    if not 0 <= target_class < params.config.num_classes:
        raise InvalidClassError(
            f"class {target_class} is not in [0, {params.config.num_classes})"
        )


def trace_for(params: ViTParams, image: LabeledImage | Array) -> tuple[ForwardTrace, str]:
    """Forward pass on one image with attention retained and a gradient path to it."""
    pixels, source_id = _model_pixels(params, image)
    x = Tensor(pixels, requires_grad=True)
    return forward(params.detached(), x, retain_attention=True), source_id


def attention_gradients(trace: ForwardTrace, target_class: int) -> list[tuple[Array, Array]]:
    """Back-propagate the target logit; ``(A, dlogit/dA)`` per block for the first image."""
    if not trace.attentions:
        raise MissingTraceError("forward trace holds no attention tensors (retain_attention=False)")
    logits = trace.logits
    if logits.ndim != 1:
        logits = slice_axis(logits, 0, 1, axis=0).reshape(logits.shape[-1])
    if not 0 <= target_class < logits.shape[0]:
        raise InvalidClassError(f"class {target_class} is not in [0, {logits.shape[0]})")
    backward(slice_axis(logits, target_class, target_class + 1, axis=0))
    pairs = []
    for attention in trace.attentions:
        grad = attention.grad if attention.grad is not None else np.zeros_like(attention.data)
        pairs.append((attention.data[0], grad[0]))
    return pairs


def propagate_relevancy(pairs: Sequence[tuple[Array, Array]]) -> Array:
    """Token-by-token relevancy ``R`` after composing every block's weighted attention."""
    tokens = pairs[0][0].shape[-1]
    R = np.eye(tokens)
    for A, grad in pairs:
        A_bar = np.maximum((A * grad).mean(axis=0), 0.0)
        R = R + A_bar @ R
    return R


def _grid(row: Array) -> Array:
    side = math.isqrt(row.size)
    if side * side != row.size:
        raise ValueError(f"{row.size} patch tokens do not form a square grid")
    return row.reshape(side, side)


def relevancy_from_trace(
    trace: ForwardTrace, target_class: int, source_id: str = ""
) -> RelevancyMap:
    R = propagate_relevancy(attention_gradients(trace, target_class))
    return RelevancyMap(_grid(R[0, 1:].copy()), target_class, source_id)


def relevancy(params: ViTParams, image: LabeledImage | Array, target_class: int) -> RelevancyMap:
    _check_class(params, target_class)
    trace, source_id = trace_for(params, image)
    return relevancy_from_trace(trace, target_class, source_id)


def gradcam_attention(
    params: ViTParams, image: LabeledImage | Array, target_class: int
) -> RelevancyMap:
    """
    Last-block variant: class-token attention to each patch, per head weighted by the
    head's mean gradient over patches, averaged over heads and clamped at zero.
    """
    _check_class(params, target_class)
    trace, source_id = trace_for(params, image)
    A, grad = attention_gradients(trace, target_class)[-1]
    cam = A[:, 0, 1:]
    weights = grad[:, 0, 1:].mean(axis=1, keepdims=True)
    grid = _grid(np.maximum((cam * weights).mean(axis=0), 0.0))
    return RelevancyMap(grid, target_class, source_id, method="gradcam")


def explain(
    params: ViTParams,
    image: LabeledImage | Array,
    target_class: int,
    method: Method = "relevancy",
) -> RelevancyMap:
    if method == "gradcam":
        return gradcam_attention(params, image, target_class)
    if method == "relevancy":
        return relevancy(params, image, target_class)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
