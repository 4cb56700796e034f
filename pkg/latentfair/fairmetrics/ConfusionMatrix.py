"""Confusion matrices, the rates derived from them and Cohen's kappa."""

import numpy as np
from box import Box

RATE_NAMES = ("accuracy", "sensitivity", "specificity", "ppv", "npv", "f1")

KAPPA_WEIGHTINGS = ("none", "linear", "quadratic")


class UndefinedMetricError(ValueError):
    """Raised when a metric has a zero denominator or missing class.
    ``reason`` names it."""

    def __init__(self, message, reason=None):
        ValueError.__init__(self, message)
        self.reason = message if reason is None else reason


class ConfusionMatrix:
    """Counts of a binary classification (class 1 is positive)."""

    def __init__(self, tp=0, fn=0, fp=0, tn=0):
        for name, count in [("tp", tp), ("fn", fn), ("fp", fp), ("tn", tn)]:
            if count < 0 or int(count) != count:
                raise ValueError("%s must be a non-negative integer, got %s"
                                 % (name, count))
        self.tp, self.fn, self.fp, self.tn = int(tp), int(fn), int(fp), int(tn)

    @property
    def total(self):
        return self.tp + self.fn + self.fp + self.tn

    @property
    def positives(self):
        return self.tp + self.fn

    @property
    def negatives(self):
        return self.tn + self.fp

    @property
    def predicted_positives(self):
        return self.tp + self.fp

    @property
    def predicted_negatives(self):
        return self.tn + self.fn

    def table(self):
        """Return the 2x2 table [[tn, fp], [fn, tp]] (rows: truth 0, 1;
        columns: prediction 0, 1)."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]])

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and (
            self.table() == other.table()).all()

    def __repr__(self):
        return "ConfusionMatrix(tp=%d, fn=%d, fp=%d, tn=%d)" % (
            self.tp, self.fn, self.fp, self.tn)


def _binary_array(values, name):
    array = np.asarray(values)
    if not np.all((array == 0) | (array == 1)):
        raise ValueError("%s must only contain 0 and 1" % name)
    return array.astype(int)


def confusion(labels, predictions):
    """Return the ConfusionMatrix of binary labels vs predictions."""
    if len(labels) != len(predictions):
        raise ValueError("Got %d labels but %d predictions"
                         % (len(labels), len(predictions)))
    labels = _binary_array(labels, "labels")
    predictions = _binary_array(predictions, "predictions")
    return ConfusionMatrix(
        tp=int(np.sum((labels == 1) & (predictions == 1))),
        fn=int(np.sum((labels == 1) & (predictions == 0))),
        fp=int(np.sum((labels == 0) & (predictions == 1))),
        tn=int(np.sum((labels == 0) & (predictions == 0))),
    )


def _ratio(numerator, denominator, denominator_name, metric):
    if denominator == 0:
        raise UndefinedMetricError(
            "%s is undefined: %s is zero" % (metric, denominator_name),
            reason="%s = 0" % denominator_name,
        )
    return numerator / float(denominator)


def accuracy(cm):
    return _ratio(cm.tp + cm.tn, cm.total, "total", "accuracy")


def sensitivity(cm):
    return _ratio(cm.tp, cm.positives, "tp + fn", "sensitivity")


def specificity(cm):
    return _ratio(cm.tn, cm.negatives, "tn + fp", "specificity")


def ppv(cm):
    return _ratio(cm.tp, cm.predicted_positives, "tp + fp", "ppv")


def npv(cm):
    return _ratio(cm.tn, cm.predicted_negatives, "tn + fn", "npv")


def f1(cm):
    """Return 2 ppv sens / (ppv + sens)."""
    precision, recall = ppv(cm), sensitivity(cm)
    return _ratio(2 * precision * recall, precision + recall, "ppv + sensitivity",
                  "f1")


RATE_FUNCTIONS = dict(accuracy=accuracy, sensitivity=sensitivity,
                      specificity=specificity, ppv=ppv, npv=npv, f1=f1)


def rates(cm):
    """Return a Box with accuracy, sensitivity, specificity, ppv, npv, f1.

    Undefined rates are None (never 0), and ``undefined`` maps their names
    to the zero denominator responsible.

    >>> rates(ConfusionMatrix(tp=40, fn=10, fp=5, tn=45)).sensitivity
    0.8
    """
    result = Box(undefined={})
    for name in RATE_NAMES:
        try:
            result[name] = RATE_FUNCTIONS[name](cm)
        except UndefinedMetricError as error:
            result[name] = None
            result.undefined[name] = error.reason
    return result


def kappa_weights(k, weighting="none"):
    """Return the K x K disagreement weights of the weighting."""
    if weighting not in KAPPA_WEIGHTINGS:
        raise ValueError("weighting must be one of %s, not %s"
                         % (KAPPA_WEIGHTINGS, weighting))
    i, j = np.indices((k, k))
    if weighting == "none":
        return (i != j).astype(float)
    distance = np.abs(i - j) / float(max(k - 1, 1))
    return distance if weighting == "linear" else distance ** 2


def cohen_kappa(table, weighting="none"):
    """Return the (weighted) Cohen kappa of a ConfusionMatrix or K x K table
    (rows: truth, columns: prediction).

    ``kappa = 1 - sum(W * O) / sum(W * E)`` with O the observed and E the
    chance-expected proportions; with unit disagreement weights this is
    ``(p_o - p_e) / (1 - p_e)``. For K = 2 all the weightings coincide.

    Raises UndefinedMetricError if the table is empty or p_e = 1.
    """
    if isinstance(table, ConfusionMatrix):
        table = table.table()
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise ValueError("Kappa needs a square table, got shape %s"
                         % list(table.shape))
    n = table.sum()
    if n == 0:
        raise UndefinedMetricError("kappa is undefined: the table is empty",
                                   reason="total = 0")
    observed = table / n
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0))
    weights = kappa_weights(len(table), weighting)
    expected_disagreement = float((weights * expected).sum())
    if expected_disagreement == 0:
        raise UndefinedMetricError(
            "kappa is undefined: chance agreement p_e is 1 (degenerate marginals)",
            reason="1 - p_e = 0",
        )
    return 1 - float((weights * observed).sum()) / expected_disagreement
