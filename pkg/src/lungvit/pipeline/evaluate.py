# SPDX-License-Identifier: MIT
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import replace
from typing import Final

import numpy as np
import numpy.typing as npt

from lungvit.data import LabeledImage
from lungvit.data import SplitDataset
from lungvit.data import model_input
from lungvit.errors import DataError
from lungvit.errors import ShapeError
from lungvit.log import logger
from lungvit.metrics import EvalReport
from lungvit.metrics import confusion
from lungvit.metrics import multiclass_roc
from lungvit.metrics import report
from lungvit.model import ViTParams
from lungvit.model import forward
from lungvit.model import init_params
from lungvit.tensor import Array
from lungvit.tensor import Tensor
from lungvit.tensor import no_grad
from lungvit.tensor import softmax

DEFAULT_EVAL_BATCH: Final = 64


def _check_compatible(params: ViTParams) -> None:
    # Images are RGB; resizing takes care of the spatial geometry.
    if params.config.channels != 3:  # noqa: PLR2004
        raise ShapeError(f"model expects {params.config.channels} channels, images have 3")


def labels_of(items: Sequence[LabeledImage]) -> npt.NDArray[np.int64]:
    return np.array([item.label for item in items], dtype=np.int64)


def predict_proba(
    params: ViTParams,
    items: Sequence[LabeledImage],
    batch_size: int = DEFAULT_EVAL_BATCH,
) -> Array:
    """Class probabilities ``(N, num_classes)``; batches are evaluated in order without a tape."""
    _check_compatible(params)
    if not items:
        raise DataError("nothing to predict: the split is empty")
    size = params.config.image_size
    chunks = []
    with no_grad():
        for start in range(0, len(items), batch_size):
            batch = model_input(list(items[start : start + batch_size]), size)
            chunks.append(softmax(forward(params, Tensor(batch)).logits).data)
    return np.concatenate(chunks)


def predict(params: ViTParams, items: Sequence[LabeledImage]) -> npt.NDArray[np.int64]:
    """Argmax class per item; ties go to the lowest class index."""
    return np.argmax(predict_proba(params, items), axis=1).astype(np.int64)


def accuracy(params: ViTParams, items: Sequence[LabeledImage]) -> float:
    return float(np.mean(predict(params, items) == labels_of(items)))


def evaluate(params: ViTParams, items: Sequence[LabeledImage]) -> EvalReport:
    """Confusion-matrix report plus one-vs-rest ROC curves for one split."""
    probabilities = predict_proba(params, items)
    labels = labels_of(items)
    predictions = np.argmax(probabilities, axis=1)
    result = report(confusion(labels, predictions, params.config.num_classes))
    return replace(result, roc=multiclass_roc(probabilities, labels))


def untrained_head(params: ViTParams) -> ViTParams:
    """
    Same backbone, projector weights zeroed: every image gets uniform probabilities
    and the gradient reaching the backbone is exactly zero (argmax ties resolve to class 0).
    """
    head = params.copy()
    for name in head.head_names():
        head[name].data[...] = 0.0
    return head


def random_head(params: ViTParams, seed: int) -> ViTParams:
    """
    Same backbone, projector re-drawn exactly as ``init_params(params.config, seed)`` draws it.

    This is the zero-shot model: a head that has never seen a label.
    """
    fresh = init_params(params.config, seed)
    head = params.copy()
    for name in head.head_names():
        head[name].data[...] = fresh[name].data
    return head


def zero_shot_eval(params: ViTParams, split: SplitDataset) -> EvalReport:
    """
    Evaluate frozen ``params`` on D_test (validation accuracy is logged as well).

    Parameters are only read; their checksum is identical before and after.
    """
    before = params.checksum()
    validation = accuracy(params, split.validation) if split.validation else float("nan")
    result = evaluate(params, split.test)
    after = params.checksum()
    if before != after:
        raise RuntimeError("zero-shot evaluation modified the parameters")
    logger.info(
        "zero-shot: validation accuracy %.4f, test accuracy %.4f", validation, result.accuracy
    )
    return result
