# SPDX-License-Identifier: MIT
"""
Zero-shot versus few-shot comparison table.

One zero-shot row (epoch 0) with both validation and test accuracy, then one row per
fine-tuning epoch, plus test-set ROC curves for both models.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Final

from lungvit.data import SplitDataset
from lungvit.errors import LungVitError
from lungvit.log import logger
from lungvit.metrics import EvalReport
from lungvit.metrics.io import format_float
from lungvit.model import ViTParams
from lungvit.pipeline.evaluate import evaluate
from lungvit.pipeline.evaluate import random_head
from lungvit.pipeline.evaluate import zero_shot_eval
from lungvit.pipeline.train import INIT_SEED_OFFSET
from lungvit.pipeline.train import EpochRecord
from lungvit.pipeline.train import TrainConfig
from lungvit.pipeline.train import fine_tune

TABLE_HEADER: Final = ("model", "epoch", "val_acc", "test_acc")


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    zero_shot_validation: EvalReport
    zero_shot_test: EvalReport
    records: list[EpochRecord]
    best_params: ViTParams
    few_shot_test: EvalReport

    @property
    def accuracy_gain(self) -> float:
        """Test-accuracy gain of the fine-tuned model over the zero-shot baseline."""
        return self.few_shot_test.accuracy - self.zero_shot_test.accuracy

    def rows(self) -> list[tuple[str, int, float, float]]:
        rows = [
            ("zero_shot", 0, self.zero_shot_validation.accuracy, self.zero_shot_test.accuracy)
        ]
        rows.extend(
            ("few_shot", r.epoch, r.validation_accuracy, r.test_accuracy) for r in self.records
        )
        return rows


def run_experiment(params: ViTParams, split: SplitDataset, cfg: TrainConfig) -> ExperimentResult:
    """
    Both models start from the same place: ``params`` with the head drawn from the run
    seed. The zero-shot row evaluates it as is; the few-shot rows fine-tune it.
    """
    baseline = random_head(params, cfg.seed + INIT_SEED_OFFSET)
    zero_shot_validation = evaluate(baseline, split.validation)
    zero_shot_test = zero_shot_eval(baseline, split)

    best, records = fine_tune(baseline, split, cfg)
    few_shot_test = evaluate(best, split.test)
    result = ExperimentResult(zero_shot_validation, zero_shot_test, records, best, few_shot_test)
    logger.info(
        "zero-shot test accuracy %.4f -> few-shot %.4f (gain %+.4f)",
        zero_shot_test.accuracy,
        few_shot_test.accuracy,
        result.accuracy_gain,
    )
    return result


def experiment_table_csv(result: ExperimentResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    writer.writerows(
        (model, epoch, format_float(val), format_float(test))
        for model, epoch, val, test in result.rows()
    )
    return buffer.getvalue()


def write_experiment_table(result: ExperimentResult, path: Path | str) -> None:
    try:
        Path(path).write_text(experiment_table_csv(result))
    except OSError as e:
        raise LungVitError(f"cannot write experiment table {str(path)!r}: {e}") from e
