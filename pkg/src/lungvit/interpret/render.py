# SPDX-License-Identifier: MIT
"""
Heatmap overlays.

The map is min-max normalized (a constant map becomes all zeros), bilinearly
upsampled to the image, passed through a 256-entry blue-to-red colormap
(entry ``k`` is ``(k/255, 0, 1 - k/255)``) and blended 50/50 with the image.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Final

import numpy as np

from lungvit.data import LabeledImage
from lungvit.data import resize_pixels
from lungvit.data import write_ppm
from lungvit.errors import LungVitError
from lungvit.errors import ShapeError
from lungvit.interpret.relevancy import RelevancyMap
from lungvit.log import logger
from lungvit.metrics.io import format_float
from lungvit.tensor import Array

COLORMAP_SIZE: Final = 256
OVERLAY_ALPHA: Final = 0.5


def _build_colormap() -> Array:
    k = np.arange(COLORMAP_SIZE) / (COLORMAP_SIZE - 1)
    return np.stack([k, np.zeros_like(k), 1.0 - k], axis=1)


COLORMAP: Final = _build_colormap()


def normalize_map(grid: Array) -> Array:
    low, high = float(grid.min()), float(grid.max())
    if high == low:
        return np.zeros_like(grid)
    return (grid - low) / (high - low)


def apply_colormap(values: Array) -> Array:
    """``(H, W)`` values in ``[0, 1]`` to ``(3, H, W)`` colors."""
    index = np.rint(np.clip(values, 0.0, 1.0) * (COLORMAP_SIZE - 1)).astype(np.int64)
    return np.ascontiguousarray(COLORMAP[index].transpose(2, 0, 1))


def overlay(relevancy_map: RelevancyMap, image: LabeledImage | Array) -> Array:
    pixels = image.pixels if isinstance(image, LabeledImage) else image
    _, h, w = pixels.shape
    p = relevancy_map.grid_size
    if h != w or h % p:
        raise ShapeError(f"a {p}x{p} map does not tile a {h}x{w} image")
    heat = np.clip(resize_pixels(normalize_map(relevancy_map.grid), h, w), 0.0, 1.0)
    return OVERLAY_ALPHA * pixels + (1.0 - OVERLAY_ALPHA) * apply_colormap(heat)


def write_map_csv(relevancy_map: RelevancyMap, path: Path | str) -> None:
    """``P`` rows of ``P`` values with 17 significant digits, no header."""
    try:
        with Path(path).open("w", newline="") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerows(
                [format_float(float(value)) for value in row] for row in relevancy_map.grid
            )
    except OSError as e:
        raise LungVitError(f"cannot write {str(path)!r}: {e}") from e


def render_heatmap(
    relevancy_map: RelevancyMap, image: LabeledImage | Array, out: Path | str
) -> tuple[Path, Path]:
    """Write the overlay to ``out`` (P6 PPM) and the raw map next to it as ``.csv``."""
    out = Path(out)
    csv_path = out.with_suffix(".csv")
    write_ppm(overlay(relevancy_map, image), out)
    write_map_csv(relevancy_map, csv_path)
    logger.info("wrote heatmap %s and map %s", out, csv_path)
    return out, csv_path
