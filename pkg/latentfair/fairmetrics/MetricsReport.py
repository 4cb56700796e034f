"""The full metric battery of one model on one slice of a partition."""

from collections import OrderedDict

import numpy as np
import pandas as pd
from box import Box

from ..ndcore import Rng
from .ConfusionMatrix import (
    UndefinedMetricError,
    confusion,
    rates,
    cohen_kappa,
)
from .ranking import roc_auc, average_precision
from .intervals import binomial_halfwidth, bootstrap_halfwidth, kappa_halfwidth

METRIC_NAMES = (
    "accuracy",
    "sensitivity",
    "specificity",
    "ppv",
    "npv",
    "kappa",
    "f1",
    "average_precision",
    "roc_auc",
)

METRIC_LABELS = OrderedDict([
    ("accuracy", "Accuracy"),
    ("sensitivity", "Sensitivity"),
    ("specificity", "Specificity"),
    ("ppv", "PPV"),
    ("npv", "NPV"),
    ("kappa", "Weighted Kappa"),
    ("f1", "F1"),
    ("average_precision", "Average Precision"),
    ("roc_auc", "ROCAUC"),
])

RANKING_CI_METHODS = ("bootstrap", "binomial")


class MetricsReport:
    """Values and 95% half-widths of all the metrics.

    ``metrics`` maps each name of METRIC_NAMES to a Box with fields value,
    halfwidth, n (the count behind the half-width) and undefined (None, or
    the reason the metric is undefined).
    """

    def __init__(self, metrics, n, confusion_matrix=None):
        self.metrics = metrics
        self.n = n
        self.confusion_matrix = confusion_matrix

    def __getitem__(self, name):
        return self.metrics[name]

    def value(self, name):
        return self.metrics[name].value

    def halfwidth(self, name):
        return self.metrics[name].halfwidth

    def to_dataframe(self, model=None, slice_name=None):
        """Return one row per metric: model, slice, metric, value,
        halfwidth, n."""
        return pd.DataFrame(
            [
                OrderedDict([
                    ("model", model),
                    ("slice", slice_name),
                    ("metric", name),
                    ("value", entry.value),
                    ("halfwidth", entry.halfwidth),
                    ("n", entry.n),
                ])
                for name, entry in self.metrics.items()
            ],
            columns=["model", "slice", "metric", "value", "halfwidth", "n"],
        )

    def __repr__(self):
        return "MetricsReport(n=%d, accuracy=%s)" % (
            self.n, self.metrics["accuracy"].value)


def _entry(value=None, halfwidth=None, n=None, undefined=None):
    return Box(value=value, halfwidth=halfwidth, n=n, undefined=undefined)


def _ranking_entry(statistic, labels, scores, method, B, rng):
    try:
        value = statistic(labels, scores)
    except UndefinedMetricError as error:
        return _entry(n=len(labels), undefined=error.reason)
    if method == "binomial":
        halfwidth = binomial_halfwidth(value, len(labels))
    else:
        try:
            halfwidth = bootstrap_halfwidth(statistic, labels, scores, B=B, rng=rng)
        except UndefinedMetricError:
            halfwidth = None
    return _entry(value, halfwidth, len(labels))


def metrics_report(labels, scores, threshold=0.5, ranking_ci="bootstrap",
                   bootstrap_samples=1000, rng=None, kappa_weighting="quadratic"):
    """Compute every metric of a binary classifier.

    Parameters
    ----------

    labels
      True 0/1 labels.

    scores
      Predicted probabilities of class 1; predictions are
      ``scores >= threshold``.

    ranking_ci
      "bootstrap" (stratified percentile bootstrap) or "binomial"
      (normal approximation with the total n) for the half-widths of
      average precision and ROC AUC.

    bootstrap_samples, rng
      Number of resamples and ndcore Rng of the bootstrap.

    kappa_weighting
      "none", "linear" or "quadratic" (identical for binary tables).

    Notes
    -----

    Rate half-widths use the binomial approximation with the rate's own
    denominator (e.g. the number of positives for sensitivity, the total
    for accuracy and F1). Undefined metrics have value None.
    """
    if ranking_ci not in RANKING_CI_METHODS:
        raise ValueError("ranking_ci must be one of %s, not %s"
                         % (RANKING_CI_METHODS, ranking_ci))
    labels = np.asarray(labels).astype(int)
    scores = np.asarray(scores, dtype=float)
    if len(labels) == 0:
        raise UndefinedMetricError("Cannot compute metrics on an empty slice",
                                   reason="n = 0")
    rng = Rng(0) if rng is None else rng
    cm = confusion(labels, (scores >= threshold).astype(int))
    rate_values = rates(cm)
    rate_counts = dict(
        accuracy=cm.total, sensitivity=cm.positives, specificity=cm.negatives,
        ppv=cm.predicted_positives, npv=cm.predicted_negatives, f1=cm.total,
    )
    metrics = OrderedDict()
    for name in METRIC_NAMES:
        if name in rate_counts:
            value, n = rate_values[name], rate_counts[name]
            if value is None:
                metrics[name] = _entry(n=n, undefined=rate_values.undefined[name])
            else:
                metrics[name] = _entry(value, binomial_halfwidth(value, n), n)
        elif name == "kappa":
            try:
                kappa = cohen_kappa(cm, weighting=kappa_weighting)
                table = cm.table() / float(cm.total)
                p_expected = float(table.sum(axis=1) @ table.sum(axis=0))
                halfwidth = kappa_halfwidth(kappa, rate_values.accuracy,
                                            p_expected, cm.total)
                metrics[name] = _entry(kappa, halfwidth, cm.total)
            except UndefinedMetricError as error:
                metrics[name] = _entry(n=cm.total, undefined=error.reason)
        else:
            statistic = roc_auc if name == "roc_auc" else average_precision
            metrics[name] = _ranking_entry(
                statistic, labels, scores, ranking_ci, bootstrap_samples,
                rng.child(1 if name == "roc_auc" else 2),
            )
    return MetricsReport(metrics, n=len(labels), confusion_matrix=cm)
