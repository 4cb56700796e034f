"""95% confidence interval half-widths."""

import warnings

import numpy as np

from ..ndcore import Rng
from .ConfusionMatrix import UndefinedMetricError

Z_95 = 1.96


def binomial_halfwidth(p, n):
    """Return the normal-approximation half-width 1.96 sqrt(p (1 - p) / n).

    >>> round(binomial_halfwidth(0.8052, 154), 4)
    0.0626
    """
    if not n > 0:
        raise ValueError("n must be positive, got %s" % n)
    if not 0 <= p <= 1:
        raise ValueError("p must be a proportion, got %s" % p)
    return Z_95 * np.sqrt(p * (1 - p) / float(n))


def kappa_halfwidth(kappa, p_observed, p_expected, n):
    """Approximate half-width 1.96 sqrt(p_o (1 - p_o) / n) / (1 - p_e)."""
    if not n > 0 or p_expected >= 1:
        raise ValueError("Need n > 0 and p_e < 1")
    return Z_95 * np.sqrt(p_observed * (1 - p_observed) / float(n)) / (
        1 - p_expected)


def bootstrap_halfwidth(statistic, labels, scores, B=1000, rng=None,
                        max_undefined_fraction=0.1):
    """Return half the spread between the 2.5% and 97.5% percentiles of a
    statistic over B stratified bootstrap resamples.

    Parameters
    ----------

    statistic
      Function ``(labels, scores) -> value``, e.g. ``roc_auc``.

    labels, scores
      The data. Positives and negatives are resampled separately, with
      replacement, keeping the class sizes.

    B
      Number of resamples. B=1 gives 0 (with a warning).

    rng
      ndcore Rng; resample r draws from ``rng.child(r)`` so results do not
      depend on the order in which resamples are computed.

    max_undefined_fraction
      UndefinedMetricError is raised if the statistic is undefined on more
      than this fraction of the resamples.
    """
    rng = Rng(0) if rng is None else rng
    labels, scores = np.asarray(labels), np.asarray(scores, dtype=float)
    if B < 1:
        raise ValueError("B must be >= 1, got %s" % B)
    if B == 1:
        warnings.warn("bootstrap_halfwidth with B=1 gives a degenerate 0 "
                      "half-width")
    positives = np.flatnonzero(labels == 1)
    negatives = np.flatnonzero(labels != 1)
    values = []
    n_undefined = 0
    for r in range(B):
        replicate_rng = rng.child(r)
        indices = np.concatenate([
            group[replicate_rng.integers(0, len(group), len(group))]
            for group in (positives, negatives) if len(group)
        ])
        try:
            values.append(statistic(labels[indices], scores[indices]))
        except UndefinedMetricError:
            n_undefined += 1
    if n_undefined > max_undefined_fraction * B:
        raise UndefinedMetricError(
            "The statistic is undefined on %d of %d bootstrap resamples"
            % (n_undefined, B),
            reason="undefined on resamples",
        )
    low, high = np.percentile(values, [2.5, 97.5])
    return (high - low) / 2.0
