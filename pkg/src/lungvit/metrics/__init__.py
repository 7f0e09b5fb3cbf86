# SPDX-License-Identifier: MIT
from lungvit.metrics.confusion import ClassMetrics
from lungvit.metrics.confusion import ConfusionMatrix
from lungvit.metrics.confusion import EvalReport
from lungvit.metrics.confusion import MacroMetrics
from lungvit.metrics.confusion import class_metrics
from lungvit.metrics.confusion import confusion
from lungvit.metrics.confusion import report
from lungvit.metrics.roc import RocCurve
from lungvit.metrics.roc import RocPoint
from lungvit.metrics.roc import auc
from lungvit.metrics.roc import multiclass_roc
from lungvit.metrics.roc import rank_auc
from lungvit.metrics.roc import roc_curve
from lungvit.metrics.roc import trapezoid_area
from lungvit.metrics.io import format_float
from lungvit.metrics.io import read_roc_csv
from lungvit.metrics.io import report_to_dict
from lungvit.metrics.io import roc_to_csv
from lungvit.metrics.io import write_metrics_json
from lungvit.metrics.io import write_roc_csv

__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "EvalReport",
    "MacroMetrics",
    "RocCurve",
    "RocPoint",
    "auc",
    "class_metrics",
    "confusion",
    "format_float",
    "multiclass_roc",
    "rank_auc",
    "read_roc_csv",
    "report",
    "report_to_dict",
    "roc_curve",
    "roc_to_csv",
    "trapezoid_area",
    "write_metrics_json",
    "write_roc_csv",
]
