# SPDX-License-Identifier: MIT
from __future__ import annotations

import hashlib
from collections.abc import Iterator
from collections.abc import Mapping
from typing import Final

import numpy as np
from scipy.stats import truncnorm

from lungvit.errors import ShapeError
from lungvit.model.config import ViTConfig
from lungvit.tensor import Tensor

INIT_STD: Final = 0.02
# Truncation at two standard deviations on either side.
INIT_TRUNCATION: Final = 2.0

HEAD_PREFIX: Final = "head."


def parameter_shapes(config: ViTConfig) -> dict[str, tuple[int, ...]]:
    """Every parameter name and shape, in the canonical (checkpoint) order."""
    d = config.embed_dim
    shapes: dict[str, tuple[int, ...]] = {
        "patch_embed.weight": (config.patch_dim, d),
        "patch_embed.bias": (d,),
        "cls_token": (d,),
        "pos_embed": (config.num_tokens, d),
    }
    for i in range(config.depth):
        block = f"blocks.{i}"
        shapes |= {
            f"{block}.norm1.gamma": (d,),
            f"{block}.norm1.beta": (d,),
            f"{block}.attn.qkv.weight": (d, 3 * d),
            f"{block}.attn.qkv.bias": (3 * d,),
            f"{block}.attn.proj.weight": (d, d),
            f"{block}.attn.proj.bias": (d,),
            f"{block}.norm2.gamma": (d,),
            f"{block}.norm2.beta": (d,),
            f"{block}.mlp.fc1.weight": (d, config.mlp_hidden),
            f"{block}.mlp.fc1.bias": (config.mlp_hidden,),
            f"{block}.mlp.fc2.weight": (config.mlp_hidden, d),
            f"{block}.mlp.fc2.bias": (d,),
        }
    shapes |= {"norm.gamma": (d,), "norm.beta": (d,)}
    if config.head_hidden:
        shapes |= {
            "head.fc1.weight": (d, config.head_hidden),
            "head.fc1.bias": (config.head_hidden,),
            "head.fc2.weight": (config.head_hidden, config.num_classes),
            "head.fc2.bias": (config.num_classes,),
        }
    else:
        shapes |= {
            "head.weight": (d, config.num_classes),
            "head.bias": (config.num_classes,),
        }
    return shapes


class ViTParams(Mapping[str, Tensor]):
    """Named leaf tensors of one ViT plus the config that fixes their shapes."""

    def __init__(self, config: ViTConfig, tensors: Mapping[str, Tensor]) -> None:
        expected = parameter_shapes(config)
        if list(tensors) != list(expected):
            missing = sorted(set(expected) - set(tensors))
            extra = sorted(set(tensors) - set(expected))
            raise ShapeError(f"parameter names do not match config: {missing=}, {extra=}")
        for name, shape in expected.items():
            if tensors[name].shape != shape:
                raise ShapeError(f"{name}: expected shape {shape}, got {tensors[name].shape}")
        self.config = config
        self._tensors = dict(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def __repr__(self) -> str:
        return f"ViTParams({self.config!r}, tensors={len(self)})"

    def head_names(self) -> list[str]:
        return [name for name in self if name.startswith(HEAD_PREFIX)]

    def backbone_names(self) -> list[str]:
        return [name for name in self if not name.startswith(HEAD_PREFIX)]

    def copy(self) -> ViTParams:
        """Independent trainable snapshot (fresh storage, zeroed grads)."""
        return ViTParams(
            self.config,
            {name: Tensor(t.data, requires_grad=True, name=name) for name, t in self.items()},
        )

    def detached(self) -> ViTParams:
        """Graph-free view sharing storage; forward passes through it record no parameter grads."""
        return ViTParams(self.config, {name: t.detach() for name, t in self.items()})

    def zero_grads(self) -> None:
        for tensor in self.values():
            tensor.zero_grad()

    def all_finite(self) -> bool:
        return all(bool(np.isfinite(t.data).all()) for t in self.values())

    def checksum(self, names: list[str] | None = None) -> str:
        """SHA-256 over names, shapes and little-endian float64 payloads."""
        digest = hashlib.sha256()
        for name in names if names is not None else list(self):
            tensor = self[name]
            digest.update(name.encode())
            digest.update(repr(tensor.shape).encode())
            digest.update(tensor.data.astype("<f8").tobytes())
        return digest.hexdigest()


def init_params(config: ViTConfig, seed: int) -> ViTParams:
    """
    Weights, class token and positional table from a truncated normal (std 0.02);
    biases and layer-norm shifts zero, layer-norm scales one. Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    sampler = truncnorm(-INIT_TRUNCATION, INIT_TRUNCATION, loc=0.0, scale=INIT_STD)

    tensors: dict[str, Tensor] = {}
    for name, shape in parameter_shapes(config).items():
        if name.endswith((".bias", ".beta")):
            values = np.zeros(shape)
        elif name.endswith(".gamma"):
            values = np.ones(shape)
        else:
            values = sampler.rvs(size=shape, random_state=rng)
        tensors[name] = Tensor(values, requires_grad=True, name=name)
    return ViTParams(config, tensors)
