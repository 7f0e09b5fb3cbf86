# SPDX-License-Identifier: MIT
"""
Checkpoint persistence.

Layout (all integers little-endian)::

    b"VITCKPT1"
    u32 config length, config text ("key=value\\n" in ViTConfig's fixed key order)
    u32 tensor count
    per tensor: u32 name length, utf-8 name, u32 rank, rank x u64 dims,
                product(dims) x float64 payload

Save -> load -> save is byte-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Final

import numpy as np

from lungvit.errors import BadMagicError
from lungvit.errors import CheckpointError
from lungvit.errors import ConfigError
from lungvit.errors import DimensionMismatchError
from lungvit.errors import ShapeError
from lungvit.errors import TruncatedPayloadError
from lungvit.log import logger
from lungvit.model.config import ViTConfig
from lungvit.model.params import ViTParams
from lungvit.model.params import parameter_shapes
from lungvit.tensor import Tensor

MAGIC: Final = b"VITCKPT1"
_U32: Final = struct.Struct("<I")
_U64: Final = struct.Struct("<Q")
_F64: Final = np.dtype("<f8")


def encode_checkpoint(params: ViTParams) -> bytes:
    config_text = params.config.to_text().encode()
    chunks = [MAGIC, _U32.pack(len(config_text)), config_text, _U32.pack(len(params))]
    for name, tensor in params.items():
        encoded = name.encode()
        chunks.append(_U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(_U32.pack(tensor.ndim))
        chunks.extend(_U64.pack(size) for size in tensor.shape)
        chunks.append(tensor.data.astype(_F64).tobytes())
    return b"".join(chunks)


def save_checkpoint(params: ViTParams, config: ViTConfig, path: Path | str) -> None:
    if config != params.config:
        raise ConfigError("config does not match the parameters being saved")
    payload = encode_checkpoint(params)
    try:
        Path(path).write_bytes(payload)
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {str(path)!r}: {e}") from e
    logger.info("saved checkpoint %s (%d tensors, %d bytes)", path, len(params), len(payload))


class _Reader:
    def __init__(self, payload: bytes) -> None:
        self.payload = payload
        self.offset = 0

    def take(self, count: int, what: str) -> bytes:
        end = self.offset + count
        if end > len(self.payload):
            raise TruncatedPayloadError(
                what, f"needs {count} bytes at offset {self.offset}, file has {len(self.payload)}"
            )
        chunk = self.payload[self.offset : end]
        self.offset = end
        return chunk

    def u32(self, what: str) -> int:
        return int(_U32.unpack(self.take(_U32.size, what))[0])

    def u64(self, what: str) -> int:
        return int(_U64.unpack(self.take(_U64.size, what))[0])


def decode_checkpoint(payload: bytes) -> tuple[ViTParams, ViTConfig]:
    if payload[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"bad magic {payload[: len(MAGIC)]!r}, expected {MAGIC!r}")
    reader = _Reader(payload)
    reader.offset = len(MAGIC)

    config_text = reader.take(reader.u32("<config>"), "<config>")
    try:
        config = ViTConfig.from_text(config_text.decode())
    except (ConfigError, UnicodeDecodeError, ValueError) as e:
        raise CheckpointError(f"unreadable config block: {e}") from e

    expected = parameter_shapes(config)
    count = reader.u32("<tensor count>")
    if count != len(expected):
        raise DimensionMismatchError(
            f"checkpoint holds {count} tensors, config needs {len(expected)}"
        )

    tensors: dict[str, Tensor] = {}
    for position in range(count):
        label = f"<tensor #{position}>"
        name = reader.take(reader.u32(label), label).decode(errors="replace")
        rank = reader.u32(name)
        dims = tuple(reader.u64(name) for _ in range(rank))
        if name not in expected:
            raise DimensionMismatchError(f"unexpected tensor {name!r}")
        if dims != expected[name]:
            raise DimensionMismatchError(
                f"tensor {name!r} has dims {dims}, config requires {expected[name]}"
            )
        size = int(np.prod(dims, dtype=np.int64))
        raw = reader.take(size * _F64.itemsize, name)
        values = np.frombuffer(raw, dtype=_F64).reshape(dims)
        tensors[name] = Tensor(values, requires_grad=True, name=name)

    if reader.offset != len(payload):
        raise CheckpointError(f"{len(payload) - reader.offset} trailing bytes after last tensor")
    try:
        return ViTParams(config, tensors), config
    except ShapeError as e:
        raise DimensionMismatchError(str(e)) from e


def load_checkpoint(path: Path | str) -> tuple[ViTParams, ViTConfig]:
    try:
        payload = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {str(path)!r}: {e}") from e
    params, config = decode_checkpoint(payload)
    logger.debug("loaded checkpoint %s: %r", path, config)
    return params, config
