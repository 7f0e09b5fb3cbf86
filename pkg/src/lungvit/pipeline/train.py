# SPDX-License-Identifier: MIT
"""
Few-shot fine-tuning: a handful of epochs over the whole of D_train.

Each epoch shuffles D_train with SplitMix64, takes minibatch steps on the
cross-entropy loss and then records validation and test accuracy. The returned
parameters are the snapshot with the best validation accuracy (later epoch on ties).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from dataclasses import replace
from pathlib import Path
from typing import Final
from typing import Literal

import numpy as np

from lungvit.data import SplitDataset
from lungvit.data import SplitMix64
from lungvit.data import model_input
from lungvit.data.split import shuffle
from lungvit.errors import ConfigError
from lungvit.errors import DataError
from lungvit.errors import DivergedTrainingError
from lungvit.errors import LungVitError
from lungvit.errors import NonFiniteError
from lungvit.log import logger
from lungvit.metrics.io import format_float
from lungvit.model import ViTParams
from lungvit.model import forward
from lungvit.pipeline.evaluate import accuracy
from lungvit.pipeline.evaluate import labels_of
from lungvit.pipeline.optim import SGD
from lungvit.pipeline.optim import Adam
from lungvit.pipeline.optim import Optimizer
from lungvit.tensor import Tensor
from lungvit.tensor import backward
from lungvit.tensor import cross_entropy

OptimizerName = Literal["adam", "sgd"]

EPOCH_LOG_HEADER: Final = ("epoch", "train_loss", "val_acc", "test_acc")

# Offsets from the run seed; the split itself uses the seed unchanged.
INIT_SEED_OFFSET: Final = 1
SHUFFLE_SEED_OFFSET: Final = 2
DROPOUT_SEED_OFFSET: Final = 3


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    batch_size: int = 32
    learning_rate: float = 3e-4
    optimizer: OptimizerName = "adam"
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    freeze_backbone: bool = False

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        # Zero is allowed: it makes a run that evaluates without ever moving the weights.
        if not math.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be finite and >= 0, got {self.learning_rate}")
        if self.optimizer not in {"adam", "sgd"}:
            raise ConfigError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")
        for name in ("momentum", "beta1", "beta2"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {getattr(self, name)}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    validation_accuracy: float
    test_accuracy: float


def make_optimizer(params: ViTParams, names: list[str], cfg: TrainConfig) -> Optimizer:
    if cfg.optimizer == "sgd":
        return SGD(params, names, lr=cfg.learning_rate, momentum=cfg.momentum)
    return Adam(params, names, lr=cfg.learning_rate, betas=(cfg.beta1, cfg.beta2), eps=cfg.eps)


def _frozen_view(params: ViTParams) -> ViTParams:
    """Head tensors shared as-is, backbone detached so no gradient reaches it."""
    head = set(params.head_names())
    return ViTParams(
        params.config,
        {name: tensor if name in head else tensor.detach() for name, tensor in params.items()},
    )


def fine_tune(
    params: ViTParams,
    split: SplitDataset,
    cfg: TrainConfig,
) -> tuple[ViTParams, list[EpochRecord]]:
    if not split.train:
        raise DataError("D_train is empty")
    if not split.validation or not split.test:
        raise DataError("fine-tuning reports validation and test accuracy; both must be nonempty")

    working = params.copy()
    trainable = working.head_names() if cfg.freeze_backbone else list(working)
    model = _frozen_view(working) if cfg.freeze_backbone else working
    optimizer = make_optimizer(working, trainable, cfg)
    shuffle_rng = SplitMix64(cfg.seed + SHUFFLE_SEED_OFFSET)
    dropout_rng = np.random.default_rng(cfg.seed + DROPOUT_SEED_OFFSET)

    inputs = model_input(split.train, working.config.image_size)
    labels = labels_of(split.train)
    order = list(range(len(split.train)))

    records: list[EpochRecord] = []
    best: ViTParams | None = None
    best_accuracy = -1.0
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        shuffle(order, shuffle_rng)
        loss_sum = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            step += 1
            optimizer.zero_grad()
            try:
                logits = forward(
                    model, Tensor(inputs[batch]), train_mode=True, rng=dropout_rng
                ).logits
                loss = cross_entropy(logits, labels[batch])
            except NonFiniteError as e:
                raise DivergedTrainingError(step, math.nan) from e
            value = loss.item()
            if not math.isfinite(value):
                raise DivergedTrainingError(step, value)
            backward(loss)
            optimizer.step()
            if not working.all_finite():
                raise DivergedTrainingError(step, value)
            loss_sum += value * len(batch)
            logger.debug("epoch %d step %d: loss %.6f", epoch, step, value)

        try:
            validation_accuracy = accuracy(working, split.validation)
            test_accuracy = accuracy(working, split.test)
        except NonFiniteError as e:
            raise DivergedTrainingError(step, math.nan) from e
        record = EpochRecord(
            epoch=epoch,
            train_loss=loss_sum / len(order),
            validation_accuracy=validation_accuracy,
            test_accuracy=test_accuracy,
        )
        records.append(record)
        logger.info(
            "epoch %d/%d: train_loss %.6f, val_acc %.4f, test_acc %.4f",
            epoch,
            cfg.epochs,
            record.train_loss,
            record.validation_accuracy,
            record.test_accuracy,
        )
        if record.validation_accuracy >= best_accuracy:
            best_accuracy = record.validation_accuracy
            best = working.copy()

    assert best is not None
    return best, records


def freeze_backbone_fine_tune(
    params: ViTParams,
    split: SplitDataset,
    cfg: TrainConfig,
) -> tuple[ViTParams, list[EpochRecord]]:
    """Frozen-backbone run: only projector-head tensors are updated."""
    return fine_tune(params, split, replace(cfg, freeze_backbone=True))


def epoch_log_csv(records: list[EpochRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EPOCH_LOG_HEADER)
    writer.writerows(
        (
            record.epoch,
            format_float(record.train_loss),
            format_float(record.validation_accuracy),
            format_float(record.test_accuracy),
        )
        for record in records
    )
    return buffer.getvalue()


def write_epoch_log(records: list[EpochRecord], path: Path | str) -> None:
    try:
        Path(path).write_text(epoch_log_csv(records))
    except OSError as e:
        raise LungVitError(f"cannot write epoch log {str(path)!r}: {e}") from e
