# SPDX-License-Identifier: MIT
from lungvit.model.config import CONFIG_KEYS
from lungvit.model.config import ViTConfig
from lungvit.model.params import ViTParams
from lungvit.model.params import init_params
from lungvit.model.params import parameter_shapes
from lungvit.model.vit import ForwardTrace
from lungvit.model.vit import forward
from lungvit.model.vit import patchify
from lungvit.model.checkpoint import MAGIC
from lungvit.model.checkpoint import decode_checkpoint
from lungvit.model.checkpoint import encode_checkpoint
from lungvit.model.checkpoint import load_checkpoint
from lungvit.model.checkpoint import save_checkpoint

__all__ = [
    "CONFIG_KEYS",
    "MAGIC",
    "ForwardTrace",
    "ViTConfig",
    "ViTParams",
    "decode_checkpoint",
    "encode_checkpoint",
    "forward",
    "init_params",
    "load_checkpoint",
    "parameter_shapes",
    "patchify",
    "save_checkpoint",
]
