"""Settings of the latent traversal and of the starter selection."""

from collections import OrderedDict

TRAVERSAL_MODES = ("shared", "per-scale")
TRAVERSAL_METRICS = ("euclidean", "generator")


class TraversalConfig:
    """Parameters of one gradient traversal.

    Parameters
    ----------

    step_size
      Gradient step size (0 is accepted and freezes the trajectory).

    max_iterations
      Maximal number of steps.

    threshold
      Stop when the disease probability reaches this value (or drops to
      ``1 - threshold`` when traversing towards ``target_label=0``).

    anchor_weight
      Weight of ``||w - w0||^2``.

    subgroup_weight
      Weight of the BCE of the latent subgroup classifier towards the
      starter's subgroup.

    mode
      "shared" (one w broadcast to every scale) or "per-scale" (every w_i
      updated independently).

    target_label
      1 to impart the disease, 0 to remove it.

    metric
      "euclidean" (plain gradient) or "generator" (gradient preconditioned
      by the generator Jacobian, see ``traverse``).

    rcond
      Relative cutoff of the singular values kept by the generator metric.
    """

    def __init__(self, step_size=0.05, max_iterations=200, threshold=0.9,
                 anchor_weight=0.01, subgroup_weight=0.1, mode="shared",
                 target_label=1, metric="euclidean", rcond=0.05):
        if step_size < 0:
            raise ValueError("The step size must be >= 0, got %s" % step_size)
        if not 0.5 < threshold < 1:
            raise ValueError("The threshold must be in (0.5, 1), got %s" % threshold)
        if anchor_weight < 0 or subgroup_weight < 0:
            raise ValueError("Penalty weights must be >= 0")
        if mode not in TRAVERSAL_MODES:
            raise ValueError("mode must be one of %s, not %s"
                             % (TRAVERSAL_MODES, mode))
        if target_label not in (0, 1):
            raise ValueError("target_label must be 0 or 1")
        if metric not in TRAVERSAL_METRICS:
            raise ValueError("metric must be one of %s, not %s"
                             % (TRAVERSAL_METRICS, metric))
        if not 0 < rcond < 1:
            raise ValueError("rcond must be in (0, 1), got %s" % rcond)
        self.step_size = step_size
        self.max_iterations = int(max_iterations)
        self.threshold = threshold
        self.anchor_weight = anchor_weight
        self.subgroup_weight = subgroup_weight
        self.mode = mode
        self.target_label = target_label
        self.metric = metric
        self.rcond = rcond

    def reached(self, p_disease):
        """Whether a disease probability satisfies the stop condition."""
        if self.target_label == 1:
            return p_disease >= self.threshold
        return p_disease <= 1 - self.threshold

    def copy(self, **changes):
        dct = self.to_dict()
        dct.update(changes)
        return TraversalConfig(**dct)

    def to_dict(self):
        return OrderedDict(sorted(self.__dict__.items()))

    def __repr__(self):
        return "TraversalConfig(eta=%s, tau=%s, anchor=%s, sub=%s, %s)" % (
            self.step_size, self.threshold, self.anchor_weight,
            self.subgroup_weight, self.mode)


class StarterCriteria:
    """Acceptance rule of the starter samples.

    Parameters
    ----------

    subgroup
      Required subgroup ("AA" or "C").

    min_subgroup_probability
      Minimal probability of the required subgroup.

    max_disease_probability
      Maximal probability of the other label: p(AMD) for healthy starters
      (source_label=0), p(healthy) for AMD starters.

    source_label
      Label of the starter cell (0 when imparting the disease).

    budget
      Maximal number of raw samples drawn (default: 50 per requested
      starter, at least 1000).
    """

    def __init__(self, subgroup="AA", min_subgroup_probability=0.9,
                 max_disease_probability=0.1, source_label=0, budget=None):
        for name, p in [("min_subgroup_probability", min_subgroup_probability),
                        ("max_disease_probability", max_disease_probability)]:
            if not 0 <= p <= 1:
                raise ValueError("%s must be in [0, 1], got %s" % (name, p))
        if subgroup not in ("AA", "C"):
            raise ValueError("subgroup must be AA or C, not %s" % subgroup)
        self.subgroup = subgroup
        self.min_subgroup_probability = min_subgroup_probability
        self.max_disease_probability = max_disease_probability
        self.source_label = source_label
        self.budget = budget

    def accepts(self, p_disease, p_subgroup):
        """Return a boolean array: which (p_disease, p(AA)) pairs pass."""
        p_group = p_subgroup if self.subgroup == "AA" else 1 - p_subgroup
        p_wrong = p_disease if self.source_label == 0 else 1 - p_disease
        return (p_group >= self.min_subgroup_probability) & (
            p_wrong <= self.max_disease_probability)

    def sample_budget(self, n):
        if self.budget is not None:
            return int(self.budget)
        return max(1000, 50 * n)

    def to_dict(self):
        return OrderedDict(sorted(self.__dict__.items()))

    def __repr__(self):
        return "StarterCriteria(%s, p>=%s, p_disease<=%s)" % (
            self.subgroup, self.min_subgroup_probability,
            self.max_disease_probability)
