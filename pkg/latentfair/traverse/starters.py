"""Rejection sampling of traversal starters."""

import numpy as np

from ..stylegen import StyleStack, sample_styles
from ..classify import latent_inputs
from ..tools import resolve_logger
from .TraversalConfig import StarterCriteria


class StarterBudgetError(ValueError):
    """Raised when the sample budget runs out before enough starters are
    accepted. ``starters`` holds the accepted ones."""

    def __init__(self, message, starters=(), acceptance_rate=0.0):
        ValueError.__init__(self, message)
        self.starters = list(starters)
        self.acceptance_rate = acceptance_rate


class Starter:
    """An accepted starter stack and its latent classifier scores."""

    def __init__(self, index, styles, p_disease, p_subgroup):
        self.index = index
        self.styles = styles
        self.p_disease = float(p_disease)
        self.p_subgroup = float(p_subgroup)

    def __repr__(self):
        return "Starter(%d, p_disease=%.3f, p_subgroup=%.3f)" % (
            self.index, self.p_disease, self.p_subgroup)


def score_styles(styles, disease_clf, subgroup_clf):
    """Return (p_disease, p_subgroup) of latent classifiers on (n, L, w)
    stacks."""
    return (
        disease_clf.predict_proba(latent_inputs(styles, disease_clf)),
        subgroup_clf.predict_proba(latent_inputs(styles, subgroup_clf)),
    )


def select_starters(n, generator, disease_clf, subgroup_clf, criteria=None,
                    rng=None, shared_styles=True, batch_size=256, logger=None):
    """Sample style stacks until ``n`` satisfy the criteria.

    Parameters
    ----------

    n
      Number of starters wanted.

    generator
      GeneratorModel used to sample the stacks.

    disease_clf, subgroup_clf
      Latent-space ClassifierModels scoring the stacks.

    criteria
      StarterCriteria (defaults: p(AA) >= 0.9, p(AMD) <= 0.1).

    rng
      ndcore Rng for the latent codes.

    Returns
    -------

    (starters, acceptance_rate)
      The list of accepted Starters (in sampling order) and the fraction of
      raw samples accepted.

    Raises
    ------

    StarterBudgetError when the budget is exhausted first.
    """
    criteria = StarterCriteria() if criteria is None else criteria
    budget = criteria.sample_budget(n)
    logger = resolve_logger(logger)
    starters = []
    drawn = 0
    while len(starters) < n and drawn < budget:
        size = min(batch_size, budget - drawn)
        styles = sample_styles(size, generator, rng, shared_styles=shared_styles)
        p_disease, p_subgroup = score_styles(styles, disease_clf, subgroup_clf)
        accepted = np.flatnonzero(criteria.accepts(p_disease, p_subgroup))
        accepted = accepted[: n - len(starters)]
        for i in accepted:
            starters.append(Starter(int(drawn + i), StyleStack(list(styles[i])),
                                    p_disease[i], p_subgroup[i]))
        # Samples after the n-th acceptance are not examined.
        drawn += int(accepted[-1] + 1) if len(starters) == n else size
        logger(message="Starters: %d/%d accepted after %d samples"
               % (len(starters), n, drawn))
    acceptance_rate = len(starters) / float(max(drawn, 1))
    if len(starters) < n:
        raise StarterBudgetError(
            "Only %d of %d starters accepted within a budget of %d samples "
            "(acceptance rate %.3f)" % (len(starters), n, budget, acceptance_rate),
            starters=starters,
            acceptance_rate=acceptance_rate,
        )
    return starters, acceptance_rate
