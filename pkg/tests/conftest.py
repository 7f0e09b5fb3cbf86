# SPDX-License-Identifier: MIT
from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from types import FunctionType
from typing import TYPE_CHECKING
from typing import Any
from typing import Final

import numpy as np
import pytest

from lungvit import log
from lungvit.data import LabeledImage
from lungvit.data import SplitDataset
from lungvit.data import gen_synthetic
from lungvit.data import split_dataset
from lungvit.data import write_image_dir
from lungvit.model import ViTConfig
from lungvit.model import ViTParams
from lungvit.model import init_params

if TYPE_CHECKING:
    from _pytest.nodes import Collector

TEST_PERFORMANCE_FILENAME = "test_performance.py"

LOG_ENV: Final = "VIT_LOG_LEVEL"

TINY: Final = ViTConfig.tiny()
# One block keeps relevancy recompositions short.
SINGLE_BLOCK: Final = ViTConfig.tiny(depth=1)


@pytest.fixture(autouse=True)
def restore_log_level():
    saved = os.environ.pop(LOG_ENV, None)
    log.configure()
    yield
    os.environ.pop(LOG_ENV, None)
    if saved is not None:
        os.environ[LOG_ENV] = saved
    # capsys is torn down before this fixture and closes the stream the handler
    # may still hold; drop it so re-attaching does not flush a closed file.
    handler = log._handler
    if isinstance(handler, logging.StreamHandler) and getattr(handler.stream, "closed", False):
        handler.stream = sys.stderr
    log.configure()


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="Run desk-scale training experiments (minutes on one core)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale experiment (opt-in with --slow)")
    config.addinivalue_line("markers", "typecheck: static assert_type checks of the public API")


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --slow flag is provided."""
    if not config.getoption("--slow"):
        skip_slow = pytest.mark.skip(reason="need --slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


def pytest_pycollect_makeitem(collector: Collector, name: str, obj: Any):
    if collector.path.name != TEST_PERFORMANCE_FILENAME or not isinstance(obj, FunctionType):
        return None

    if obj.__name__.startswith("test_"):
        raise NameError(
            f"{TEST_PERFORMANCE_FILENAME} must contain only benchmark functions: "
            f"remove 'test_' prefix from {name!r}."
        )

    if "benchmark" in obj.__code__.co_varnames:
        return list(collector._genfunctions(name, obj))

    return None


# ---------------------------------------------------------------------------
# Shared builders
# ---------------------------------------------------------------------------


def random_image(config: ViTConfig = TINY, seed: int = 0) -> np.ndarray:
    """A normalized model input ``(C, S, S)``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(config.channels, config.image_size, config.image_size))


def synthetic_split(
    per_class: int = 10, seed: int = 0, *, stratified: bool = True
) -> SplitDataset:
    items = gen_synthetic(per_class, TINY.image_size, seed)
    return split_dataset(items, seed, stratified=stratified)


@pytest.fixture
def tiny_params() -> ViTParams:
    return init_params(TINY, seed=1)


@pytest.fixture
def synthetic_items() -> list[LabeledImage]:
    return gen_synthetic(4, TINY.image_size, seed=0)


@pytest.fixture
def image_dir(tmp_path: Path, synthetic_items: list[LabeledImage]) -> Path:
    root = tmp_path / "images"
    write_image_dir(synthetic_items, root)
    return root
