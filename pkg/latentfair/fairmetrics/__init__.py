"""Classification metrics with confidence intervals, sliced by subgroup."""

from .ConfusionMatrix import (
    ConfusionMatrix,
    UndefinedMetricError,
    confusion,
    rates,
    cohen_kappa,
    kappa_weights,
    RATE_NAMES,
    KAPPA_WEIGHTINGS,
)
from .ranking import roc_auc, average_precision
from .intervals import binomial_halfwidth, bootstrap_halfwidth, kappa_halfwidth
from .MetricsReport import (
    MetricsReport,
    metrics_report,
    METRIC_NAMES,
    METRIC_LABELS,
    RANKING_CI_METHODS,
)
from .GapReport import GapReport, gap_report
