# SPDX-License-Identifier: MIT
"""
Desk-scale stand-in for the three lung classes.

Class ``c`` is brightest in color channel ``c`` and carries horizontal stripes with
``c + 1`` periods per image; seeded uniform noise of amplitude ``noise`` sits on top.
Per-channel means alone separate the classes.
"""

from __future__ import annotations

from typing import Final

import numpy as np

from lungvit.data.images import CLASS_NAMES
from lungvit.data.images import LabeledImage
from lungvit.errors import DataError

DOMINANT_LEVEL: Final = 0.65
BACKGROUND_LEVEL: Final = 0.3
STRIPE_AMPLITUDE: Final = 0.12
DEFAULT_NOISE: Final = 0.1


def class_template(label: int, image_size: int) -> np.ndarray:
    """Noise-free image of one class, ``(3, S, S)``."""
    pixels = np.full((3, image_size, image_size), BACKGROUND_LEVEL)
    pixels[label] = DOMINANT_LEVEL
    rows = np.arange(image_size) + 0.5
    stripes = STRIPE_AMPLITUDE * np.sin(2.0 * np.pi * (label + 1) * rows / image_size)
    return pixels + stripes[np.newaxis, :, np.newaxis]


def gen_synthetic(
    per_class: int,
    image_size: int,
    seed: int,
    noise: float = DEFAULT_NOISE,
) -> list[LabeledImage]:
    if per_class < 1:
        raise DataError(f"per_class must be >= 1, got {per_class}")
    if image_size < 1:
        raise DataError(f"image_size must be >= 1, got {image_size}")
    if noise < 0:
        raise DataError(f"noise must be >= 0, got {noise}")

    rng = np.random.default_rng(seed)
    items = []
    for label, class_name in enumerate(CLASS_NAMES):
        template = class_template(label, image_size)
        for index in range(per_class):
            jitter = rng.uniform(-noise, noise, size=template.shape) if noise else 0.0
            items.append(
                LabeledImage(
                    pixels=np.clip(template + jitter, 0.0, 1.0),
                    label=label,
                    class_name=class_name,
                    source_id=f"{class_name}/{class_name}_{index:04d}.ppm",
                )
            )
    return items
