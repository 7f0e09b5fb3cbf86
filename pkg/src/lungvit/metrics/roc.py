# SPDX-License-Identifier: MIT
"""
One-vs-rest ROC curves and rank-based AUC.

Samples with equal scores enter the curve together, and the rank statistic credits
tied positive/negative pairs with one half, so the trapezoid area under a curve
equals its AUC.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Final
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.stats import rankdata

from lungvit.errors import MetricsError
from lungvit.errors import ShapeError
from lungvit.errors import SingleClassError

ROW_SUM_TOLERANCE: Final = 1e-6

Scores = Sequence[float] | npt.NDArray[np.float64]
Flags = Sequence[bool] | npt.NDArray[np.bool_]


class RocPoint(NamedTuple):
    threshold: float
    fpr: float
    tpr: float


@dataclass(frozen=True)
class RocCurve:
    class_index: int
    points: list[RocPoint] = field(default_factory=list)
    auc: float = 0.0
    # Set when the class has no positives or no negatives; the curve is then empty.
    undefined: bool = False


def _prepare(
    scores: Scores, is_positive: Flags
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    values = np.asarray(scores, dtype=np.float64).reshape(-1)
    positive = np.asarray(is_positive, dtype=bool).reshape(-1)
    if values.shape != positive.shape:
        raise ShapeError(f"{values.size} scores but {positive.size} labels")
    if not np.isfinite(values).all():
        raise MetricsError("scores must be finite")
    n_pos = int(positive.sum())
    if n_pos == 0 or n_pos == values.size:
        raise SingleClassError(
            f"ROC needs positive and negative samples, got {n_pos} of {values.size} positive"
        )
    return values, positive


def rank_auc(scores: Scores, is_positive: Flags) -> float:
    """``(#pos > neg pairs + 0.5 #ties) / (P N)`` via average ranks."""
    values, positive = _prepare(scores, is_positive)
    n_pos = int(positive.sum())
    n_neg = values.size - n_pos
    ranks = rankdata(values)
    u = float(ranks[positive].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def roc_curve(scores: Scores, is_positive: Flags, class_index: int = 0) -> RocCurve:
    """
    Thresholds are the distinct scores in descending order behind a ``+inf`` sentinel;
    each point counts samples with ``score >= threshold``.
    """
    values, positive = _prepare(scores, is_positive)
    n_pos = int(positive.sum())
    n_neg = values.size - n_pos

    order = np.argsort(-values, kind="stable")
    ranked = values[order]
    tp = np.cumsum(positive[order])
    fp = np.cumsum(~positive[order])
    # Last index of every run of equal scores.
    ends = np.flatnonzero(np.append(ranked[1:] != ranked[:-1], True))

    points = [RocPoint(math.inf, 0.0, 0.0)]
    points.extend(
        RocPoint(float(ranked[i]), int(fp[i]) / n_neg, int(tp[i]) / n_pos) for i in ends
    )
    return RocCurve(class_index, points, rank_auc(values, positive))


def trapezoid_area(curve: RocCurve) -> float:
    area = 0.0
    for previous, point in zip(curve.points, curve.points[1:]):
        area += (point.fpr - previous.fpr) * (point.tpr + previous.tpr) / 2.0
    return area


def auc(curve_or_scores: RocCurve | Scores, is_positive: Flags | None = None) -> float:
    """AUC of a computed curve, or of raw scores with their positive flags."""
    if isinstance(curve_or_scores, RocCurve):
        return curve_or_scores.auc
    if is_positive is None:
        raise MetricsError("auc() of raw scores needs is_positive")
    return rank_auc(curve_or_scores, is_positive)


def multiclass_roc(
    probabilities: npt.NDArray[np.float64],
    labels: Sequence[int] | npt.NDArray[np.int64],
) -> list[RocCurve]:
    """One-vs-rest curves; a class without members (or without non-members) is undefined."""
    probs = np.asarray(probabilities, dtype=np.float64)
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    if probs.ndim != 2 or probs.shape[0] != targets.size:  # noqa: PLR2004
        raise ShapeError(f"probabilities {probs.shape} do not match {targets.size} labels")
    if not np.allclose(probs.sum(axis=1), 1.0, rtol=0.0, atol=ROW_SUM_TOLERANCE):
        raise MetricsError("probability rows must sum to 1")

    curves = []
    for c in range(probs.shape[1]):
        positive = targets == c
        if positive.all() or not positive.any():
            curves.append(RocCurve(c, undefined=True))
        else:
            curves.append(roc_curve(probs[:, c], positive, class_index=c))
    return curves
