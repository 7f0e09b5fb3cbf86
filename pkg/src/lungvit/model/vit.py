# SPDX-License-Identifier: MIT
"""
ViT backbone plus MLP projector.

patchify -> linear embed -> prepend class token -> add positional table ->
depth x (LN -> multi-head self-attention -> residual -> LN -> MLP -> residual) ->
final LN -> projector on the class-token position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field

import numpy as np

from lungvit.errors import ShapeError
from lungvit.model.params import ViTParams
from lungvit.tensor import Array
from lungvit.tensor import Tensor
from lungvit.tensor import add
from lungvit.tensor import concat
from lungvit.tensor import dropout
from lungvit.tensor import gelu
from lungvit.tensor import layer_norm
from lungvit.tensor import matmul
from lungvit.tensor import permute
from lungvit.tensor import reshape
from lungvit.tensor import scale
from lungvit.tensor import slice_axis
from lungvit.tensor import softmax
from lungvit.tensor import transpose


@dataclass
class ForwardTrace:
    logits: Tensor
    # One (batch, heads, tokens, tokens) tensor per block when retained.
    attentions: list[Tensor] = field(default_factory=list)


def patchify(image: Tensor | Array, patch_size: int) -> Tensor:
    """
    Split ``(C, H, W)`` (or ``(B, C, H, W)``) into non-overlapping patches.

    Patches are ordered row-major over the grid; each row holds one patch's pixels
    flattened in ``(C, p, p)`` order, so a single-patch image yields its own flattening.
    """
    image = image if isinstance(image, Tensor) else Tensor(image)
    single = image.ndim == 3
    if image.ndim not in {3, 4}:
        raise ShapeError(f"patchify expects (C, H, W) or (B, C, H, W), got {image.shape}")
    batch = image if not single else reshape(image, (1, *image.shape))
    b, c, h, w = batch.shape
    if h % patch_size or w % patch_size:
        raise ShapeError(f"image {h}x{w} is not divisible into {patch_size}x{patch_size} patches")

    gh, gw = h // patch_size, w // patch_size
    grid = reshape(batch, (b, c, gh, patch_size, gw, patch_size))
    grid = permute(grid, (0, 2, 4, 1, 3, 5))
    patches = reshape(grid, (b, gh * gw, c * patch_size * patch_size))
    return reshape(patches, patches.shape[1:]) if single else patches


def _linear(x: Tensor, params: ViTParams, prefix: str) -> Tensor:
    return add(matmul(x, params[f"{prefix}.weight"]), params[f"{prefix}.bias"])


def _attention(x: Tensor, params: ViTParams, block: str, keep: list[Tensor] | None) -> Tensor:
    config = params.config
    b, t, d = x.shape
    heads, dh = config.heads, config.head_dim

    qkv = _linear(x, params, f"{block}.attn.qkv")

    def split_heads(index: int) -> Tensor:
        part = slice_axis(qkv, index * d, (index + 1) * d, axis=-1)
        return transpose(reshape(part, (b, t, heads, dh)), 1, 2)

    q, k, v = split_heads(0), split_heads(1), split_heads(2)
    scores = scale(matmul(q, transpose(k, -1, -2)), 1.0 / math.sqrt(dh))
    attn = softmax(scores)
    if keep is not None:
        keep.append(attn.retain_grad())
    context = reshape(transpose(matmul(attn, v), 1, 2), (b, t, d))
    return _linear(context, params, f"{block}.attn.proj")


def _check_geometry(params: ViTParams, shape: tuple[int, ...]) -> None:
    config = params.config
    expected = (config.channels, config.image_size, config.image_size)
    if shape[-3:] != expected or len(shape) not in {3, 4}:
        raise ShapeError(f"image shape {shape} does not match model input {expected}")


def forward(
    params: ViTParams,
    image: Tensor | Array,
    train_mode: bool = False,
    *,
    rng: np.random.Generator | None = None,
    retain_attention: bool = False,
) -> ForwardTrace:
    """
    Run the network on one normalized image ``(C, H, W)`` or a batch ``(B, C, H, W)``.

    Dropout is active only with ``train_mode`` and a generator. With
    ``retain_attention`` the per-block attention tensors are kept in the trace and
    marked to retain their gradients.
    """
    config = params.config
    image = image if isinstance(image, Tensor) else Tensor(image)
    _check_geometry(params, image.shape)
    single = image.ndim == 3
    rate = config.drop_rate if train_mode else 0.0
    keep: list[Tensor] | None = [] if retain_attention else None

    batch = reshape(image, (1, *image.shape)) if single else image
    patches = patchify(batch, config.patch_size)
    b = patches.shape[0]
    tokens = _linear(patches, params, "patch_embed")
    cls = add(
        reshape(params["cls_token"], (1, 1, config.embed_dim)),
        Tensor(np.zeros((b, 1, config.embed_dim))),
    )
    x = add(concat([cls, tokens], axis=1), params["pos_embed"])
    x = dropout(x, rate, rng)

    for i in range(config.depth):
        block = f"blocks.{i}"
        h = layer_norm(x, params[f"{block}.norm1.gamma"], params[f"{block}.norm1.beta"])
        x = add(x, dropout(_attention(h, params, block, keep), rate, rng))
        h = layer_norm(x, params[f"{block}.norm2.gamma"], params[f"{block}.norm2.beta"])
        h = gelu(_linear(h, params, f"{block}.mlp.fc1"))
        x = add(x, dropout(_linear(h, params, f"{block}.mlp.fc2"), rate, rng))

    x = layer_norm(x, params["norm.gamma"], params["norm.beta"])
    cls_out = reshape(slice_axis(x, 0, 1, axis=1), (b, config.embed_dim))
    if config.head_hidden:
        hidden = dropout(gelu(_linear(cls_out, params, "head.fc1")), rate, rng)
        logits = _linear(hidden, params, "head.fc2")
    else:
        logits = _linear(cls_out, params, "head")

    if single:
        logits = reshape(logits, (config.num_classes,))
    return ForwardTrace(logits=logits, attentions=keep or [])
