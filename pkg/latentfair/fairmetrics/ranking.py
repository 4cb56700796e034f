"""Ranking metrics: ROC AUC and average precision."""

import numpy as np
from scipy.stats import rankdata
from sklearn.metrics import average_precision_score

from .ConfusionMatrix import UndefinedMetricError


def _check_inputs(labels, scores):
    labels, scores = np.asarray(labels), np.asarray(scores, dtype=float)
    if len(labels) != len(scores):
        raise ValueError("Got %d labels but %d scores" % (len(labels), len(scores)))
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must only contain 0 and 1")
    return labels.astype(int), scores


def roc_auc(labels, scores):
    """Return the ROC AUC in its Mann-Whitney form: the fraction of
    (positive, negative) pairs ranked concordantly, ties counting half.

    Computed from average ranks: ``(R_pos - P (P + 1) / 2) / (P N)``.
    """
    labels, scores = _check_inputs(labels, scores)
    n_positives = int(labels.sum())
    n_negatives = len(labels) - n_positives
    if n_positives == 0 or n_negatives == 0:
        raise UndefinedMetricError(
            "ROC AUC is undefined with a single class (%d positives, %d "
            "negatives)" % (n_positives, n_negatives),
            reason="single class",
        )
    ranks = rankdata(scores, method="average")
    positive_ranks = ranks[labels == 1].sum()
    return float(
        (positive_ranks - n_positives * (n_positives + 1) / 2.0)
        / (n_positives * n_negatives)
    )


def average_precision(labels, scores):
    """Return ``sum_k (R_k - R_(k-1)) P_k`` over the decreasing distinct
    score thresholds. Tied scores share one threshold, so the result does
    not depend on the order of the inputs."""
    labels, scores = _check_inputs(labels, scores)
    if labels.sum() == 0:
        raise UndefinedMetricError(
            "Average precision is undefined without positives",
            reason="no positives",
        )
    return float(average_precision_score(labels, scores))
