"""Render the comparison report as markdown."""

from collections import OrderedDict

import pandas

from ..fairmetrics import METRIC_LABELS

SUBSET_ROWS = OrderedDict([
    ("C", "Accuracy (Caucasians)"),
    ("AA", "Accuracy (African Americans)"),
])

LEFTOVER_ROW = "Accuracy (Leftover Set)"


def _cell(value, halfwidth):
    if value is None or pandas.isnull(value):
        return "undefined"
    if halfwidth is None or pandas.isnull(halfwidth):
        return "%.2f" % (100 * value)
    return "%.2f (%.2f)" % (100 * value, 100 * halfwidth)


def _lookup(metrics, model, slice_name, metric):
    rows = metrics[(metrics["model"] == model) & (metrics["slice"] == slice_name)
                   & (metrics["metric"] == metric)]
    if len(rows) == 0:
        return None, None
    return rows["value"].iloc[0], rows["halfwidth"].iloc[0]


def results_table_rows(metrics, models):
    """Return [(row label, [cell per model])] in the report's order: the
    nine metrics on the full test set, the two subgroup accuracies, then
    the leftover-set accuracy (if present)."""
    rows = []
    for metric, label in METRIC_LABELS.items():
        rows.append((label, [_cell(*_lookup(metrics, m, "all", metric))
                             for m in models]))
    for subgroup, label in SUBSET_ROWS.items():
        rows.append((label, [_cell(*_lookup(metrics, m, subgroup, "accuracy"))
                             for m in models]))
    if (metrics["slice"] == "leftover").any():
        rows.append((LEFTOVER_ROW, [_cell(*_lookup(metrics, m, "leftover",
                                                   "accuracy"))
                                    for m in models]))
    return rows


def report_to_markdown(metrics, gaps, data=None, target=None):
    """Return the markdown report (and write it to ``target`` if provided).

    Parameters
    ----------

    metrics
      The metrics table (see ``metrics_reports_dataframe``), e.g. read back
      from metrics.csv.

    gaps
      The gap table (see ``GapReport.to_dataframe``).

    data
      Optional dict of run information printed under "Run" (generator
      mode, augmentation counts, trajectory outcomes...).
    """
    models = list(gaps["model"])
    lines = ["# Debiasing comparison", ""]
    lines.append("Values are percentages with 95% CI half-widths in "
                 "parentheses.")
    lines.append("")
    lines.append("| Metric | " + " | ".join(models) + " |")
    lines.append("|---" * (len(models) + 1) + "|")
    for label, cells in results_table_rows(metrics, models):
        lines.append("| %s | %s |" % (label, " | ".join(cells)))
    lines += ["", "## Subgroup accuracy gap", ""]
    for _, row in gaps.iterrows():
        lines.append(
            "- %s: gap %.2f points (%s the subgroup confidence intervals)"
            % (row["model"], 100 * row["gap"],
               "within" if row["gap_within_ci"] else "outside")
        )
    lines.append("- gap delta (%s - %s): %.2f points"
                 % (models[0], models[-1], 100 * gaps["gap_delta"].iloc[0]))
    reduction = gaps["relative_gap_reduction"].iloc[-1]
    if not pandas.isnull(reduction):
        lines.append("- relative gap reduction: %.1f%%" % (100 * reduction))
    if data:
        lines += ["", "## Run", ""]
        for key, value in data.items():
            lines.append("- %s: %s" % (key, value))
    text = "\n".join(lines) + "\n"
    if target is not None:
        with open(target, "w") as f:
            f.write(text)
    return text
