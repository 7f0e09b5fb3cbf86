# SPDX-License-Identifier: MIT
"""Metrics JSON and ROC CSV writers (plus the CSV reader the chart tool uses)."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any
from typing import Final

from lungvit.data import CLASS_NAMES
from lungvit.errors import LungVitError
from lungvit.errors import MetricsError
from lungvit.metrics.confusion import EvalReport
from lungvit.metrics.roc import RocCurve
from lungvit.metrics.roc import RocPoint

ROC_HEADER: Final = ("class", "threshold", "fpr", "tpr")


def format_float(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def report_to_dict(report: EvalReport, class_names: Sequence[str] = CLASS_NAMES) -> dict[str, Any]:
    """Key order is fixed: accuracy, per_class, macro, auc."""
    return {
        "accuracy": report.accuracy,
        "per_class": [
            {
                "class": class_names[c],
                "precision": metrics.precision,
                "recall": metrics.recall,
                "sensitivity": metrics.sensitivity,
                "specificity": metrics.specificity,
                "undefined": list(metrics.undefined),
            }
            for c, metrics in enumerate(report.per_class)
        ],
        "macro": {
            "precision": report.macro.precision,
            "recall": report.macro.recall,
            "sensitivity": report.macro.sensitivity,
            "specificity": report.macro.specificity,
        },
        "auc": [
            {
                "class": class_names[curve.class_index],
                "auc": curve.auc,
                "undefined": curve.undefined,
            }
            for curve in report.roc
        ],
    }


def _write_text(path: Path | str, text: str, what: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise LungVitError(f"cannot write {what} {str(path)!r}: {e}") from e


def write_metrics_json(
    report: EvalReport, path: Path | str, class_names: Sequence[str] = CLASS_NAMES
) -> None:
    _write_text(path, json.dumps(report_to_dict(report, class_names), indent=2) + "\n", "metrics")


def roc_to_csv(curves: Sequence[RocCurve], class_names: Sequence[str] = CLASS_NAMES) -> str:
    """Header ``class,threshold,fpr,tpr``; undefined curves contribute no rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(ROC_HEADER)
    for curve in curves:
        writer.writerows(
            (
                class_names[curve.class_index],
                format_float(point.threshold),
                format_float(point.fpr),
                format_float(point.tpr),
            )
            for point in curve.points
        )
    return buffer.getvalue()


def write_roc_csv(
    curves: Sequence[RocCurve], path: Path | str, class_names: Sequence[str] = CLASS_NAMES
) -> None:
    _write_text(path, roc_to_csv(curves, class_names), "ROC curves")


def read_roc_csv(path: Path | str) -> dict[str, list[RocPoint]]:
    try:
        with Path(path).open(newline="") as file:
            rows = list(csv.reader(file))
    except OSError as e:
        raise MetricsError(f"cannot read {str(path)!r}: {e}") from e
    if not rows or tuple(rows[0]) != ROC_HEADER:
        raise MetricsError(f"{str(path)!r}: header must be {','.join(ROC_HEADER)}")
    curves: dict[str, list[RocPoint]] = {}
    for name, threshold, fpr, tpr in rows[1:]:
        curves.setdefault(name, []).append(RocPoint(float(threshold), float(fpr), float(tpr)))
    return curves
