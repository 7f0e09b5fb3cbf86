# SPDX-License-Identifier: MIT
"""
lungvit benchmark suite for CodSpeed.

Each group isolates one stage of the experiment pipeline. Within a group
variants share the same code path and differ only in size.

  1. forward        -> patch embedding, encoder blocks, head
  2. backward       -> cross-entropy gradient through the whole network
  3. relevancy      -> forward with attention kept, then relevancy propagation
  4. split/metrics  -> SplitMix64 shuffles, rank AUC, ROC sweeps
"""

from __future__ import annotations

import os
import platform
import sys
from typing import Any
from typing import NamedTuple

import numpy as np
import pytest

from lungvit.data import gen_synthetic
from lungvit.data import split_dataset
from lungvit.interpret import relevancy
from lungvit.metrics import rank_auc
from lungvit.metrics import roc_curve
from lungvit.model import ViTConfig
from lungvit.model import decode_checkpoint
from lungvit.model import encode_checkpoint
from lungvit.model import forward
from lungvit.model import init_params
from lungvit.tensor import Tensor
from lungvit.tensor import backward
from lungvit.tensor import cross_entropy
from tests.conftest import random_image


class Case(NamedTuple):
    name: str
    obj: Any
    memory: bool = True


CODSPEED_MEMORY = bool(os.getenv("CODSPEED_MEMORY"))


def generate_params(cases):
    return pytest.mark.parametrize(
        "case",
        (pytest.param(c, id=c.name) for c in cases if not CODSPEED_MEMORY or c.memory),
    )


python_version = ".".join(map(str, sys.version_info[:2]))
python_version += f"-{platform.machine()}"

PYTHON_VERSION = pytest.mark.parametrize("_python", [python_version])

DEPTHS = (1, 2, 4)
BATCHES = (1, 8, 32)
SAMPLES = (100, 1000, 10000)


# ═══════════════════════════════════════════════════════════
#  MODEL
# ═══════════════════════════════════════════════════════════


def model_case(depth: int) -> Case:
    config = ViTConfig.tiny(depth=depth)
    return Case(f"depth-{depth}", (init_params(config, 0), random_image(config)), memory=depth > 1)


def batch_case(size: int) -> Case:
    config = ViTConfig.tiny()
    rng = np.random.default_rng(size)
    images = rng.uniform(-1.0, 1.0, size=(size, 3, config.image_size, config.image_size))
    labels = rng.integers(0, config.num_classes, size=size)
    return Case(f"batch-{size}", (init_params(config, 0), images, labels), memory=size >= 8)


MODEL_CASES = [model_case(d) for d in DEPTHS]
BATCH_CASES = [batch_case(n) for n in BATCHES]


def forward_and_backward(params, images, labels):
    params.zero_grads()
    loss = cross_entropy(forward(params, Tensor(images), train_mode=True).logits, labels)
    backward(loss)


# ═══════════════════════════════════════════════════════════
#  DATA AND METRICS
# ═══════════════════════════════════════════════════════════


def scores_case(n: int) -> Case:
    rng = np.random.default_rng(n)
    # Rounded scores force tie groups through the sweep.
    scores = np.round(rng.uniform(size=n), 2)
    flags = rng.uniform(size=n) < 0.4
    return Case(f"scores-n-{n}", (scores, flags), memory=n >= 1000)


SCORE_CASES = [scores_case(n) for n in SAMPLES]
SPLIT_CASES = [
    Case(f"items-{3 * n}", gen_synthetic(n, 8, seed=0), memory=n >= 100) for n in (10, 100, 1000)
]


# ═══════════════════════════════════════════════════════════
#  BENCHMARKS
# ═══════════════════════════════════════════════════════════


@PYTHON_VERSION
@generate_params(MODEL_CASES)
def inference(case: Case, _python, benchmark):
    params, image = case.obj
    benchmark(forward, params.detached(), image)


@PYTHON_VERSION
@generate_params(BATCH_CASES)
def training_step(case: Case, _python, benchmark):
    benchmark(forward_and_backward, *case.obj)


@PYTHON_VERSION
@generate_params(MODEL_CASES)
def relevancy_map(case: Case, _python, benchmark):
    params, image = case.obj
    benchmark(relevancy, params, image, 0)


@PYTHON_VERSION
@generate_params(MODEL_CASES)
def checkpoint_codec(case: Case, _python, benchmark):
    params, _ = case.obj
    benchmark(lambda: decode_checkpoint(encode_checkpoint(params)))


@PYTHON_VERSION
@generate_params(SPLIT_CASES)
def stratified_split(case: Case, _python, benchmark):
    benchmark(split_dataset, case.obj, 1234, stratified=True)


@PYTHON_VERSION
@generate_params(SCORE_CASES)
def auc_by_ranks(case: Case, _python, benchmark):
    benchmark(rank_auc, *case.obj)


@PYTHON_VERSION
@generate_params(SCORE_CASES)
def roc_sweep(case: Case, _python, benchmark):
    benchmark(roc_curve, *case.obj)
