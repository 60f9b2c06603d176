"""Confusion matrix, classification scores, and rank-based ROC-AUC.

AUC is the Mann-Whitney probability that a random positive outscores a
random negative, with ties credited 0.5. It is computed with exact
rational arithmetic on midranks, so equal score sets give exactly 0.5.
The positive class is label 1 (LUAD).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from omiq.errors import OmiqValidationError
from omiq.validation import check_binary_labels


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationScores:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: bool  # a zero denominator was reported as 0


def confusion(labels, preds):
    labels = check_binary_labels(labels)
    preds = check_binary_labels(preds)
    if labels.shape != preds.shape:
        raise OmiqValidationError("labels and predictions differ in length")
    tp = int(np.sum((labels == 1) & (preds == 1)))
    fp = int(np.sum((labels == 0) & (preds == 1)))
    tn = int(np.sum((labels == 0) & (preds == 0)))
    fn = int(np.sum((labels == 1) & (preds == 0)))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def classification_scores(cm):
    """Accuracy/precision/recall/F1, computed in exact rational arithmetic.

    A zero-denominator score is reported as 0 with the degenerate flag set.
    """
    if cm.total == 0:
        raise OmiqValidationError("empty confusion matrix")
    degenerate = False
    accuracy = Fraction(cm.tp + cm.tn, cm.total)
    if cm.tp + cm.fp > 0:
        precision = Fraction(cm.tp, cm.tp + cm.fp)
    else:
        precision, degenerate = Fraction(0), True
    if cm.tp + cm.fn > 0:
        recall = Fraction(cm.tp, cm.tp + cm.fn)
    else:
        recall, degenerate = Fraction(0), True
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = Fraction(0), True
    return ClassificationScores(
        accuracy=float(accuracy), precision=float(precision),
        recall=float(recall), f1=float(f1), degenerate=degenerate,
    )


def roc_auc(labels, scores):
    """Tie-aware rank AUC, exact on counts."""
    labels = check_binary_labels(labels)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape:
        raise OmiqValidationError("labels and scores differ in length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OmiqValidationError("both classes required for AUC")
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    # midranks as exact fractions (ranks are 1-based)
    ranks = [Fraction(0)] * labels.size
    i = 0
    while i < labels.size:
        j = i
        while j + 1 < labels.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        mid = Fraction(i + 1 + j + 1, 2)
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    rank_sum = sum(r for r, lab in zip(ranks, labels) if lab == 1)
    u = rank_sum - Fraction(n_pos * (n_pos + 1), 2)
    return float(u / (n_pos * n_neg))
