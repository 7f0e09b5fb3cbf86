# SPDX-License-Identifier: MIT
from __future__ import annotations

from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import fields
from dataclasses import replace
from typing import Any
from typing import Final

from lungvit.errors import ConfigError

# Fixed key order of the checkpoint's config block.
CONFIG_KEYS: Final = (
    "image_size",
    "patch_size",
    "channels",
    "embed_dim",
    "depth",
    "heads",
    "mlp_ratio",
    "head_hidden",
    "num_classes",
    "drop_rate",
)


@dataclass(frozen=True)
class ViTConfig:
    """
    Architecture hyperparameters; every parameter shape is derived from these.

    ``head_hidden == 0`` makes the projector a single linear layer.
    """

    image_size: int = 32
    patch_size: int = 8
    channels: int = 3
    embed_dim: int = 32
    depth: int = 2
    heads: int = 2
    mlp_ratio: int = 2
    head_hidden: int = 32
    num_classes: int = 3
    drop_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in CONFIG_KEYS:
            if name in {"head_hidden", "drop_rate"}:
                continue
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.head_hidden < 0:
            raise ConfigError(f"head_hidden must be >= 0, got {self.head_hidden}")
        if not 0.0 <= self.drop_rate < 1.0:
            raise ConfigError(f"drop_rate must be in [0, 1), got {self.drop_rate}")
        if self.image_size % self.patch_size:
            raise ConfigError(
                f"image_size {self.image_size} is not divisible by patch_size {self.patch_size}"
            )
        if self.embed_dim % self.heads:
            raise ConfigError(f"embed_dim {self.embed_dim} is not divisible by heads {self.heads}")

    @classmethod
    def tiny(cls, **overrides: Any) -> ViTConfig:
        return replace(cls(), **overrides)

    @classmethod
    def base(cls, **overrides: Any) -> ViTConfig:
        """B/16 geometry: 224 px input, 196 patches of 16x16."""
        full = cls(
            image_size=224,
            patch_size=16,
            embed_dim=768,
            depth=12,
            heads=12,
            mlp_ratio=4,
            head_hidden=768,
        )
        return replace(full, **overrides)

    @property
    def grid_size(self) -> int:
        return self.image_size // self.patch_size

    @property
    def num_patches(self) -> int:
        return self.grid_size**2

    @property
    def num_tokens(self) -> int:
        return self.num_patches + 1

    @property
    def patch_dim(self) -> int:
        return self.patch_size**2 * self.channels

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.heads

    @property
    def mlp_hidden(self) -> int:
        return self.embed_dim * self.mlp_ratio

    def to_text(self) -> str:
        values = asdict(self)
        return "".join(f"{key}={values[key]!r}\n" for key in CONFIG_KEYS)

    @classmethod
    def from_text(cls, text: str) -> ViTConfig:
        types = {f.name: f.type for f in fields(cls)}
        values: dict[str, Any] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, sep, raw = line.partition("=")
            if not sep or key not in types:
                raise ConfigError(f"unexpected config line {line!r}")
            values[key] = float(raw) if types[key] == "float" else int(raw)
        missing = [key for key in CONFIG_KEYS if key not in values]
        if missing:
            raise ConfigError(f"config block is missing {missing}")
        return cls(**values)
