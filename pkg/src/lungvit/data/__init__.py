# SPDX-License-Identifier: MIT
from lungvit.data.images import CLASS_INDEX
from lungvit.data.images import CLASS_NAMES
from lungvit.data.images import LabeledImage
from lungvit.data.images import load_image_dir
from lungvit.data.images import model_input
from lungvit.data.images import normalize_pixels
from lungvit.data.images import read_image
from lungvit.data.images import resize_pixels
from lungvit.data.images import resize_square
from lungvit.data.images import resize_to_input
from lungvit.data.images import write_image_dir
from lungvit.data.images import write_ppm
from lungvit.data.split import SPLIT_NAMES
from lungvit.data.split import ManifestRow
from lungvit.data.split import SplitDataset
from lungvit.data.split import SplitMix64
from lungvit.data.split import SplitName
from lungvit.data.split import apply_manifest
from lungvit.data.split import read_manifest
from lungvit.data.split import split_counts
from lungvit.data.split import split_dataset
from lungvit.data.split import write_manifest
from lungvit.data.synthetic import class_template
from lungvit.data.synthetic import gen_synthetic

__all__ = [
    "CLASS_INDEX",
    "CLASS_NAMES",
    "SPLIT_NAMES",
    "LabeledImage",
    "ManifestRow",
    "SplitDataset",
    "SplitMix64",
    "SplitName",
    "apply_manifest",
    "class_template",
    "gen_synthetic",
    "load_image_dir",
    "model_input",
    "normalize_pixels",
    "read_image",
    "read_manifest",
    "resize_pixels",
    "resize_square",
    "resize_to_input",
    "split_counts",
    "split_dataset",
    "write_image_dir",
    "write_manifest",
    "write_ppm",
]
