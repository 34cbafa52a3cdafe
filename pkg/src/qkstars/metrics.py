"""Confusion matrices and the summary scores reported for each experiment."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ConfusionMatrix:
    """``counts[i, j]`` = samples of true class ``classes[i]`` predicted as ``classes[j]``."""

    classes: list
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else float("nan")

    def reorder(self, classes) -> "ConfusionMatrix":
        idx = [self.classes.index(c) for c in classes]
        return ConfusionMatrix(list(classes), self.counts[np.ix_(idx, idx)])

    def to_csv(self, path, values=None, fmt="{:d}") -> None:
        values = self.counts if values is None else values
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["true\\pred"] + [str(c) for c in self.classes])
            for c, row in zip(self.classes, values):
                w.writerow([str(c)] + [fmt.format(v) for v in row.tolist()])


@dataclass
class PercentMatrix:
    classes: list
    values: np.ndarray
    empty_rows: list = field(default_factory=list)


def confusion(y_true, y_pred, classes) -> ConfusionMatrix:
    classes = list(classes)
    index = {c: i for i, c in enumerate(classes)}
    y_true = list(np.asarray(y_true).tolist())
    y_pred = list(np.asarray(y_pred).tolist())
    if len(y_true) != len(y_pred):
        raise ValueError(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in index or p not in index:
            bad = t if t not in index else p
            raise ValueError(f"label {bad!r} is not in the class list {classes}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(classes, counts)


def to_percent(cm: ConfusionMatrix) -> PercentMatrix:
    """Row-normalised percentages; rows with no true samples stay zero and are flagged."""
    sums = cm.counts.sum(axis=1)
    vals = np.zeros(cm.counts.shape, dtype=np.float64)
    nz = sums > 0
    vals[nz] = cm.counts[nz] / sums[nz, None] * 100.0
    empty = [c for c, s in zip(cm.classes, sums) if s == 0]
    return PercentMatrix(list(cm.classes), vals, empty)


def _ratio(num, den):
    return (num / den, False) if den else (float("nan"), True)


@dataclass
class BinaryMetrics:
    accuracy: float
    f1: float
    specificity: float
    sensitivity: float
    undefined: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "f1": self.f1,
            "specificity": self.specificity,
            "sensitivity": self.sensitivity,
            "undefined": list(self.undefined),
        }


def binary_counts(cm: ConfusionMatrix, positive=1) -> tuple[int, int, int, int]:
    """(TP, FN, TN, FP) for a two-class matrix."""
    if len(cm.classes) != 2 or positive not in cm.classes:
        raise ValueError(f"need a 2-class matrix containing {positive!r}, got {cm.classes}")
    p = cm.classes.index(positive)
    n = 1 - p
    c = cm.counts
    return int(c[p, p]), int(c[p, n]), int(c[n, n]), int(c[n, p])


def binary_metrics(cm: ConfusionMatrix, positive=1) -> BinaryMetrics:
    """Accuracy, F1, specificity and sensitivity with ``positive`` (giant) as the positive class."""
    tp, fn, tn, fp = binary_counts(cm, positive)
    undefined = []
    acc, u = _ratio(tp + tn, tp + fn + tn + fp)
    if u:
        undefined.append("accuracy")
    sens, u = _ratio(tp, tp + fn)
    if u:
        undefined.append("sensitivity")
    spec, u = _ratio(tn, tn + fp)
    if u:
        undefined.append("specificity")
    f1, u = _ratio(2 * tp, 2 * tp + fp + fn)
    if u:
        undefined.append("f1")
    return BinaryMetrics(acc, f1, spec, sens, undefined)


def per_class_f1(cm: ConfusionMatrix) -> dict:
    """One-vs-rest F1 for each class; NaN where 2TP+FP+FN = 0."""
    c = cm.counts
    out = {}
    for i, cls in enumerate(cm.classes):
        tp = c[i, i]
        fn = c[i].sum() - tp
        fp = c[:, i].sum() - tp
        out[cls] = _ratio(2 * tp, 2 * tp + fp + fn)[0]
    return out


def macro_f1(cm: ConfusionMatrix) -> tuple[float, list]:
    """Unweighted mean of the defined per-class F1 scores, and the excluded classes."""
    scores = per_class_f1(cm)
    undefined = [c for c, v in scores.items() if np.isnan(v)]
    defined = [v for v in scores.values() if not np.isnan(v)]
    value = float(np.mean(defined)) if defined else float("nan")
    return value, undefined


def multiclass_summary(cm: ConfusionMatrix) -> dict:
    mf1, undefined = macro_f1(cm)
    return {
        "accuracy": cm.accuracy(),
        "macro_f1": mf1,
        "per_class_f1": {str(k): float(v) for k, v in per_class_f1(cm).items()},
        "undefined": [str(c) for c in undefined],
    }
