"""Subgroup slices of two models' metrics and their accuracy gaps."""

from collections import OrderedDict

import numpy as np
import pandas as pd

from ..tools import SUBGROUPS, SUBGROUP_NAMES
from .ConfusionMatrix import UndefinedMetricError
from .MetricsReport import metrics_report
from .intervals import binomial_halfwidth


class GapReport:
    """Per-model, per-slice MetricsReports and subgroup accuracy gaps.

    Attributes
    ----------

    reports
      {model: {slice: MetricsReport}} with slices "all", "C", "AA".

    gaps
      {model: |accuracy_C - accuracy_AA|}.

    gap_delta
      Gap of the first model minus gap of the second (positive when the
      second model is fairer).

    gap_within_ci
      {model: True if the gap is smaller than the sum of the two subgroup
      accuracy half-widths, i.e. the intervals overlap}.

    leftover
      {model: Box(value, halfwidth, n)} accuracy on the leftover partition,
      or None.
    """

    def __init__(self, models, reports, leftover=None):
        self.models = list(models)
        self.reports = reports
        self.leftover = leftover
        self.gaps = OrderedDict()
        self.gap_within_ci = OrderedDict()
        for model in self.models:
            accuracy_c = reports[model]["C"]["accuracy"]
            accuracy_aa = reports[model]["AA"]["accuracy"]
            gap = abs(accuracy_c.value - accuracy_aa.value)
            self.gaps[model] = gap
            self.gap_within_ci[model] = bool(
                gap <= accuracy_c.halfwidth + accuracy_aa.halfwidth)
        self.gap_delta = self.gaps[self.models[0]] - self.gaps[self.models[-1]]

    def relative_gap_reduction(self):
        """Return 1 - gap_second / gap_first (None if the first gap is 0)."""
        first, last = self.gaps[self.models[0]], self.gaps[self.models[-1]]
        return None if first == 0 else 1 - last / first

    def to_dataframe(self):
        """One row per model: accuracies per subgroup, gap, gap within CI,
        leftover accuracy, gap delta and relative gap reduction (see ``relative_gap_reduction``)."""
        rows = []
        for model in self.models:
            row = OrderedDict([("model", model)])
            for subgroup in SUBGROUPS:
                entry = self.reports[model][subgroup]["accuracy"]
                row["accuracy_%s" % subgroup] = entry.value
                row["halfwidth_%s" % subgroup] = entry.halfwidth
            row["gap"] = self.gaps[model]
            row["gap_within_ci"] = self.gap_within_ci[model]
            if self.leftover is not None:
                row["leftover_accuracy"] = self.leftover[model]["value"]
                row["leftover_halfwidth"] = self.leftover[model]["halfwidth"]
            row["gap_delta"] = self.gap_delta
            row["relative_gap_reduction"] = self.relative_gap_reduction()
            rows.append(row)
        return pd.DataFrame(rows)

    def __repr__(self):
        return "GapReport(%s)" % ", ".join(
            "%s gap %.4f" % (model, gap) for model, gap in self.gaps.items())


def gap_report(predictions, labels, subgroups, leftover=None, threshold=0.5,
               **metrics_parameters):
    """Compare models on a test partition sliced by subgroup.

    Parameters
    ----------

    predictions
      OrderedDict {model_name: scores on the test partition}, usually
      baseline first, adapted second.

    labels, subgroups
      True labels and subgroup codes ("C"/"AA") of the test records.

    leftover
      Optional (labels, {model_name: scores}) of the leftover partition.

    threshold, metrics_parameters
      Passed to ``metrics_report``.
    """
    labels = np.asarray(labels)
    subgroups = np.asarray(subgroups)
    for subgroup in SUBGROUPS:
        if not np.any(subgroups == subgroup):
            raise UndefinedMetricError(
                "Subgroup %s (%s) is absent from the test partition"
                % (subgroup, SUBGROUP_NAMES[subgroup]),
                reason="missing subgroup %s" % subgroup,
            )
    reports = OrderedDict()
    for model, scores in predictions.items():
        scores = np.asarray(scores, dtype=float)
        reports[model] = OrderedDict()
        reports[model]["all"] = metrics_report(
            labels, scores, threshold=threshold, **metrics_parameters)
        for subgroup in SUBGROUPS:
            mask = subgroups == subgroup
            reports[model][subgroup] = metrics_report(
                labels[mask], scores[mask], threshold=threshold,
                **metrics_parameters)
    leftover_accuracies = None
    if leftover is not None:
        leftover_labels, leftover_scores = leftover
        leftover_labels = np.asarray(leftover_labels)
        leftover_accuracies = OrderedDict()
        for model in predictions:
            predicted = np.asarray(leftover_scores[model]) >= threshold
            accuracy = float(np.mean(predicted == leftover_labels))
            leftover_accuracies[model] = OrderedDict([
                ("value", accuracy),
                ("halfwidth", binomial_halfwidth(accuracy, len(leftover_labels))),
                ("n", len(leftover_labels)),
            ])
    return GapReport(predictions.keys(), reports, leftover=leftover_accuracies)
