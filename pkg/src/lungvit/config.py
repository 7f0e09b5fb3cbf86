# SPDX-License-Identifier: MIT
"""
Run configuration: defaults <- config file <- command-line flags.

The config file is flat ``key=value`` text; blank lines and ``#`` comments are
ignored. Keys are the :class:`RunConfig` field names. Unknown keys and values that do
not parse are rejected before anything runs.
"""

from __future__ import annotations

from collections.abc import Callable
from collections.abc import Mapping
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import fields
from dataclasses import replace
from pathlib import Path
from typing import Any
from typing import Final
from typing import Literal

from lungvit.errors import ConfigError
from lungvit.model import ViTConfig
from lungvit.pipeline import INIT_SEED_OFFSET
from lungvit.pipeline import TrainConfig

Preset = Literal["tiny", "base"]

# ViTConfig keys a run may override on top of its preset.
VIT_OVERRIDES: Final = (
    "image_size",
    "patch_size",
    "embed_dim",
    "depth",
    "heads",
    "mlp_ratio",
    "head_hidden",
    "drop_rate",
)
TRAIN_KEYS: Final = (
    "epochs",
    "batch_size",
    "learning_rate",
    "optimizer",
    "momentum",
    "beta1",
    "beta2",
    "eps",
    "freeze_backbone",
)

_TRUE: Final = frozenset({"1", "true", "yes", "on"})
_FALSE: Final = frozenset({"0", "false", "no", "off"})


def parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


@dataclass(frozen=True)
class RunConfig:
    preset: Preset = "tiny"
    image_size: int | None = None
    patch_size: int | None = None
    embed_dim: int | None = None
    depth: int | None = None
    heads: int | None = None
    mlp_ratio: int | None = None
    head_hidden: int | None = None
    drop_rate: float | None = None

    epochs: int = 5
    batch_size: int = 32
    learning_rate: float = 3e-4
    optimizer: Literal["adam", "sgd"] = "adam"
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    freeze_backbone: bool = False

    seed: int = 0
    stratified: bool = False

    data: Path | None = None
    manifest: Path | None = None
    ckpt: Path | None = None
    out: Path | None = None
    log: Path | None = None

    def __post_init__(self) -> None:
        if self.preset not in {"tiny", "base"}:
            raise ConfigError(f"preset must be 'tiny' or 'base', got {self.preset!r}")

    @property
    def init_seed(self) -> int:
        return self.seed + INIT_SEED_OFFSET

    def vit_config(self) -> ViTConfig:
        base = ViTConfig.base() if self.preset == "base" else ViTConfig.tiny()
        overrides = {
            key: getattr(self, key) for key in VIT_OVERRIDES if getattr(self, key) is not None
        }
        return replace(base, **overrides)

    def train_config(self) -> TrainConfig:
        return TrainConfig(seed=self.seed, **{key: getattr(self, key) for key in TRAIN_KEYS})

    def require(self, *keys: str) -> None:
        missing = [key for key in keys if getattr(self, key) is None]
        if missing:
            flags = ", ".join(f"--{key.replace('_', '-')}" for key in missing)
            raise ConfigError(f"missing required setting(s): {flags}")

    def as_text(self) -> str:
        """The resolved configuration in config-file form (unset keys omitted)."""
        values = asdict(self)
        return "".join(
            f"{key}={'true' if value is True else 'false' if value is False else value}\n"
            for key, value in values.items()
            if value is not None
        )


def _coercers() -> dict[str, Callable[[str], Any]]:
    table: dict[str, Callable[[str], Any]] = {}
    for f in fields(RunConfig):
        kind = str(f.type)
        if kind.startswith("bool"):
            table[f.name] = parse_bool
        elif kind.startswith("int"):
            table[f.name] = int
        elif kind.startswith("float"):
            table[f.name] = float
        elif kind.startswith("Path"):
            table[f.name] = Path
        else:
            table[f.name] = str
    return table


COERCE: Final = _coercers()


def read_config_file(path: Path | str) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {str(path)!r}: {e}") from e
    values: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{str(path)!r} line {number}: expected key=value, got {line!r}")
        values[key.strip()] = raw.strip()
    return values


def _apply(values: dict[str, Any], updates: Mapping[str, Any], origin: str) -> None:
    for key, value in updates.items():
        if key not in COERCE:
            raise ConfigError(f"unknown {origin} key {key!r}")
        if isinstance(value, str):
            try:
                value = COERCE[key](value)
            except ValueError as e:
                raise ConfigError(f"bad value for {key!r} in {origin}: {e}") from e
        values[key] = value


def resolve(
    file_values: Mapping[str, str] | None = None,
    flag_values: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Merge defaults, then the config file, then flags; validate the module configs."""
    values: dict[str, Any] = {}
    _apply(values, file_values or {}, "config file")
    _apply(values, flag_values or {}, "flag")
    config = RunConfig(**values)
    config.vit_config()
    config.train_config()
    return config
