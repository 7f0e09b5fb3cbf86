# SPDX-License-Identifier: MIT
from typing import Final

import numpy as np

from lungvit.model import ViTConfig

CONFIG: Final = ViTConfig.tiny(depth=1)
IMAGE: Final = np.zeros((CONFIG.channels, CONFIG.image_size, CONFIG.image_size))

__all__ = ["CONFIG", "IMAGE"]
