# SPDX-License-Identifier: MIT
"""
Confusion-matrix statistics.

Per-class values are one-vs-rest. Recall and sensitivity are the same number; both
names are kept because both are reported. A zero denominator gives 0 and sets the
metric's name in ``undefined`` instead of producing NaN.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from lungvit.errors import LabelError
from lungvit.errors import MetricsError
from lungvit.errors import ShapeError

if TYPE_CHECKING:
    from lungvit.metrics.roc import RocCurve

Labels = Sequence[int] | npt.NDArray[np.int64]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    # Rows are true classes, columns predicted classes.
    counts: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        if self.counts.ndim != 2 or self.counts.shape[0] != self.counts.shape[1]:  # noqa: PLR2004
            raise ShapeError(f"confusion counts must be square, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise MetricsError("confusion counts must be nonnegative")

    @property
    def num_classes(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def one_vs_rest(self, c: int) -> tuple[int, int, int, int]:
        """``(tp, fp, fn, tn)`` for class ``c``."""
        tp = int(self.counts[c, c])
        fp = int(self.counts[:, c].sum()) - tp
        fn = int(self.counts[c, :].sum()) - tp
        return tp, fp, fn, self.total - tp - fp - fn


def confusion(true_labels: Labels, predicted_labels: Labels, num_classes: int) -> ConfusionMatrix:
    true = np.asarray(true_labels, dtype=np.int64).reshape(-1)
    predicted = np.asarray(predicted_labels, dtype=np.int64).reshape(-1)
    if true.shape != predicted.shape:
        raise ShapeError(f"{true.size} true labels but {predicted.size} predictions")
    for name, labels in (("true", true), ("predicted", predicted)):
        bad = labels[(labels < 0) | (labels >= num_classes)]
        if bad.size:
            raise LabelError(f"{name} label {int(bad[0])} outside [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (true, predicted), 1)
    return ConfusionMatrix(counts)


def _ratio(numerator: int, denominator: int) -> tuple[float, bool]:
    if denominator == 0:
        return 0.0, True
    return numerator / denominator, False


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    specificity: float
    undefined: tuple[str, ...] = ()

    @property
    def sensitivity(self) -> float:
        return self.recall


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    specificity: float

    @property
    def sensitivity(self) -> float:
        return self.recall


@dataclass(frozen=True, eq=False)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    per_class: list[ClassMetrics]
    macro: MacroMetrics
    roc: list[RocCurve] = field(default_factory=list)

    @property
    def num_samples(self) -> int:
        return self.confusion.total


def class_metrics(matrix: ConfusionMatrix, c: int) -> ClassMetrics:
    tp, fp, fn, tn = matrix.one_vs_rest(c)
    precision, no_precision = _ratio(tp, tp + fp)
    recall, no_recall = _ratio(tp, tp + fn)
    specificity, no_specificity = _ratio(tn, tn + fp)
    flags = zip(("precision", "recall", "specificity"), (no_precision, no_recall, no_specificity))
    return ClassMetrics(
        precision=precision,
        recall=recall,
        specificity=specificity,
        undefined=tuple(name for name, flag in flags if flag),
    )


def report(matrix: ConfusionMatrix) -> EvalReport:
    total = matrix.total
    if total == 0:
        raise MetricsError("cannot report on an empty confusion matrix")
    per_class = [class_metrics(matrix, c) for c in range(matrix.num_classes)]
    macro = MacroMetrics(
        precision=float(np.mean([m.precision for m in per_class])),
        recall=float(np.mean([m.recall for m in per_class])),
        specificity=float(np.mean([m.specificity for m in per_class])),
    )
    accuracy = int(np.trace(matrix.counts)) / total
    return EvalReport(confusion=matrix, accuracy=accuracy, per_class=per_class, macro=macro)
