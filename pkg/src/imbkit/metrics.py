"""Confusion matrix, the eight evaluation metrics, and ROC/AUC.

The positive class (label 1) is always the minority class. Metrics whose
denominator is zero are reported as None ("undefined") rather than raising
or coercing to 0; aggregation layers exclude and count them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import Empty, LengthMismatch, SingleClass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")
        if self.total < 1:
            raise Empty("confusion matrix over zero samples")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class MetricsReport:
    """The eight metrics; None marks an undefined (zero-denominator) value."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    g_mean: float | None
    specificity: float | None
    kappa: float | None
    auc: float | None = None

    FIELDS = ("accuracy", "precision", "recall", "f1", "g_mean", "specificity", "kappa", "auc")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


def confusion(labels, predictions) -> ConfusionMatrix:
    """Count TP/FN/FP/TN with label 1 as the positive class."""
    y = np.asarray(labels).reshape(-1)
    p = np.asarray(predictions).reshape(-1)
    if y.shape != p.shape:
        raise LengthMismatch(f"{y.shape[0]} labels vs {p.shape[0]} predictions")
    if y.shape[0] == 0:
        raise Empty("no samples to evaluate")
    return ConfusionMatrix(
        tp=int(((y == 1) & (p == 1)).sum()),
        fn=int(((y == 1) & (p == 0)).sum()),
        fp=int(((y == 0) & (p == 1)).sum()),
        tn=int(((y == 0) & (p == 0)).sum()),
    )


def compute_metrics(cm: ConfusionMatrix, auc: float | None = None) -> MetricsReport:
    """Derive the seven threshold metrics from a confusion matrix.

    Kappa uses chance agreement from the marginals:
    p_e = [(TP+FP)(TP+FN) + (FN+TN)(FP+TN)] / n^2.
    """
    n = cm.total
    tp, fn, fp, tn = cm.tp, cm.fn, cm.fp, cm.tn

    accuracy = (tp + tn) / n
    specificity = tn / (tn + fp) if tn + fp > 0 else None
    recall = tp / (tp + fn) if tp + fn > 0 else None
    precision = tp / (tp + fp) if tp + fp > 0 else None
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn > 0 else None
    if recall is not None and specificity is not None:
        g_mean = float(np.sqrt(recall * specificity))
    else:
        g_mean = None
    p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n)
    kappa = (accuracy - p_e) / (1 - p_e) if p_e != 1.0 else None

    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        g_mean=g_mean,
        specificity=specificity,
        kappa=kappa,
        auc=auc,
    )


def kappa_band(kappa: float) -> str:
    """Reliability band: robust (>= 0.75), general ([0.4, 0.75)), unreliable (< 0.4)."""
    if kappa >= 0.75:
        return "robust"
    if kappa >= 0.4:
        return "general"
    return "unreliable"


def roc_curve(labels, scores) -> list[tuple[float, float]]:
    """(fpr, tpr) points swept over the distinct score values, descending.

    Starts at (0, 0), ends at (1, 1); tied scores collapse into a single
    point, so fpr is non-decreasing along the sequence.
    """
    y = np.asarray(labels).reshape(-1)
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    if y.shape != s.shape:
        raise LengthMismatch(f"{y.shape[0]} labels vs {s.shape[0]} scores")
    pos = int((y == 1).sum())
    neg = int((y == 0).sum())
    if pos == 0 or neg == 0:
        raise SingleClass("ROC needs both classes present")

    order = np.argsort(-s, kind="stable")
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(y)
    while i < n:
        j = i
        while j < n and s[order[j]] == s[order[i]]:
            if y[order[j]] == 1:
                tp += 1
            else:
                fp += 1
            j += 1
        points.append((fp / neg, tp / pos))
        i = j
    return points


def auc(points) -> float:
    """Trapezoidal area under an roc_curve() polyline."""
    area = 0.0
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        area += (x2 - x1) * (y1 + y2) / 2.0
    return area


def roc_auc(labels, scores) -> float:
    return auc(roc_curve(labels, scores))
