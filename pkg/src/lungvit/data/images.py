# SPDX-License-Identifier: MIT
"""
Image ingestion and preprocessing.

Only binary PPM (P6) and uncompressed 24-bit BMP are accepted; LC25000 ships JPEG,
so convert once before loading (any tool that writes P6 or 24-bit BMP will do).
"""

from __future__ import annotations

import io
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Final

import numpy as np
from PIL import Image
from PIL import UnidentifiedImageError

from lungvit.errors import DataError
from lungvit.errors import DecodeError
from lungvit.errors import EmptyClassError
from lungvit.errors import MissingClassError
from lungvit.errors import NonSquareError
from lungvit.log import logger
from lungvit.tensor import Array

CLASS_NAMES: Final = ("lung_aca", "lung_scc", "lung_n")
CLASS_INDEX: Final = {name: index for index, name in enumerate(CLASS_NAMES)}
IMAGE_SUFFIXES: Final = frozenset({".ppm", ".bmp"})

NORM_MEAN: Final = 0.5
NORM_STD: Final = 0.5

_BMP_BITS_OFFSET: Final = 28


@dataclass(frozen=True, eq=False)
class LabeledImage:
    pixels: Array
    label: int
    class_name: str
    source_id: str

    def __post_init__(self) -> None:
        if CLASS_INDEX.get(self.class_name) != self.label:
            raise DataError(
                f"{self.source_id}: label {self.label} does not match {self.class_name}"
            )
        if self.pixels.ndim != 3 or self.pixels.shape[0] != 3:
            raise DataError(f"{self.source_id}: pixels must be (3, H, W), got {self.pixels.shape}")
        if self.pixels.min() < 0.0 or self.pixels.max() > 1.0:
            raise DataError(f"{self.source_id}: pixel values outside [0, 1]")

    @property
    def size(self) -> int:
        return int(self.pixels.shape[-1])


def _check_header(path: Path, payload: bytes) -> None:
    if payload[:2] == b"P6":
        return
    if payload[:2] == b"BM":
        if len(payload) < _BMP_BITS_OFFSET + 2:
            raise DecodeError(path, "truncated BMP header")
        (bits,) = struct.unpack_from("<H", payload, _BMP_BITS_OFFSET)
        if bits != 24:  # noqa: PLR2004
            raise DecodeError(path, f"{bits}-bit BMP is not supported, expected 24-bit")
        return
    raise DecodeError(path, f"unsupported format (magic {payload[:2]!r}), expected P6 PPM or BMP")


def read_image(path: Path | str) -> Array:
    """Decode one file into a ``(3, H, W)`` float64 array scaled to ``[0, 1]``."""
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise DecodeError(path, e.strerror or str(e)) from e
    _check_header(path, payload)
    try:
        with Image.open(io.BytesIO(payload)) as image:
            if image.info.get("compression", 0) != 0:
                raise DecodeError(path, "compressed BMP is not supported")
            image.load()
            rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as e:
        raise DecodeError(path, str(e)) from e
    return np.ascontiguousarray(rgb.transpose(2, 0, 1) / 255.0)


def to_uint8(pixels: Array) -> np.ndarray:
    """``(3, H, W)`` in ``[0, 1]`` to an ``(H, W, 3)`` byte image."""
    scaled = np.rint(np.clip(pixels, 0.0, 1.0) * 255.0)
    return np.ascontiguousarray(scaled.transpose(1, 2, 0).astype(np.uint8))


def write_ppm(pixels: Array, path: Path | str) -> None:
    """Write ``(3, H, W)`` pixels in ``[0, 1]`` as binary PPM (P6)."""
    path = Path(path)
    try:
        Image.fromarray(to_uint8(pixels)).save(path, format="PPM")
    except OSError as e:
        raise DataError(f"cannot write {str(path)!r}: {e}") from e


def write_image_dir(items: list[LabeledImage], root: Path | str) -> list[Path]:
    """Write items as ``root/<source_id>``; source ids are ``class_name/filename``."""
    root = Path(root)
    written = []
    for item in items:
        target = root / item.source_id
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DataError(f"cannot create {str(target.parent)!r}: {e}") from e
        write_ppm(item.pixels, target)
        written.append(target)
    logger.info("wrote %d images under %s", len(written), root)
    return written


def load_image_dir(root: Path | str) -> list[LabeledImage]:
    """
    Load ``root/{lung_aca,lung_scc,lung_n}/*.ppm|*.bmp`` sorted by (class_name, filename).

    Unknown sub-directories and files with other suffixes are skipped with a warning.
    """
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"data directory {str(root)!r} does not exist")

    for child in sorted(root.iterdir()):
        if child.is_dir() and child.name not in CLASS_INDEX:
            warnings.warn(f"ignoring unknown class directory {str(child)!r}", stacklevel=2)

    items: list[LabeledImage] = []
    for class_name in sorted(CLASS_NAMES):
        class_dir = root / class_name
        if not class_dir.is_dir():
            raise MissingClassError(class_name, root)
        files = []
        for file in sorted(class_dir.iterdir(), key=lambda p: p.name):
            if not file.is_file() or file.name.startswith("."):
                continue
            if file.suffix.lower() not in IMAGE_SUFFIXES:
                warnings.warn(f"ignoring {str(file)!r}: not a .ppm or .bmp file", stacklevel=2)
                continue
            files.append(file)
        if not files:
            raise EmptyClassError(class_name)
        items.extend(
            LabeledImage(
                pixels=read_image(file),
                label=CLASS_INDEX[class_name],
                class_name=class_name,
                source_id=f"{class_name}/{file.name}",
            )
            for file in files
        )
        logger.debug("loaded %d images of %s", len(files), class_name)

    logger.info("loaded %d images from %s", len(items), root)
    return items


def _axis_taps(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, Array]:
    # Half-pixel centers, clamped at the borders.
    position = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    position = np.clip(position, 0.0, n_in - 1)
    lo = np.floor(position).astype(np.int64)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, position - lo


def resize_pixels(pixels: Array, height: int, width: int | None = None) -> Array:
    """Bilinear resize of ``(C, H, W)`` (or ``(H, W)``) to ``height x width``."""
    width = height if width is None else width
    squeeze = pixels.ndim == 2  # noqa: PLR2004
    grid = pixels[np.newaxis] if squeeze else pixels
    _, h, w = grid.shape
    if (h, w) == (height, width):
        out = grid.copy()
    else:
        lo, hi, frac = _axis_taps(h, height)
        v0, v1 = grid[:, lo, :], grid[:, hi, :]
        rows = v0 + frac[np.newaxis, :, np.newaxis] * (v1 - v0)
        lo, hi, frac = _axis_taps(w, width)
        v0, v1 = rows[:, :, lo], rows[:, :, hi]
        out = v0 + frac[np.newaxis, np.newaxis, :] * (v1 - v0)
    return out[0] if squeeze else out


def resize_square(pixels: Array, target: int, name: str = "image") -> Array:
    """Bilinear resize of a square ``(C, S, S)`` image to ``target``, kept inside ``[0, 1]``."""
    _, h, w = pixels.shape
    if h != w:
        raise NonSquareError(f"{name}: image is {h}x{w}, expected a square image")
    return np.clip(resize_pixels(pixels, target), 0.0, 1.0)


def resize_to_input(image: LabeledImage, target: int) -> LabeledImage:
    pixels = resize_square(image.pixels, target, image.source_id)
    return LabeledImage(pixels, image.label, image.class_name, image.source_id)


def normalize_pixels(pixels: Array) -> Array:
    """Standardize each channel with mean 0.5 and std 0.5 (maps ``[0, 1]`` onto ``[-1, 1]``)."""
    return (pixels - NORM_MEAN) / NORM_STD


def model_input(items: list[LabeledImage], image_size: int) -> Array:
    """Resize and normalize a list of images into one ``(B, 3, S, S)`` batch."""
    return np.stack([normalize_pixels(resize_to_input(item, image_size).pixels) for item in items])
