"""Planning of the synthetic records needed to rebalance a training set."""

import math
import warnings
from collections import OrderedDict

from ..tools import all_cells, cell_to_name, name_to_cell


class AugmentationPlan:
    """Target counts of the cells of a training set and what it takes to
    reach them.

    Parameters
    ----------

    current
      {cell: count} of the training set.

    targets
      {cell: target count}, never below the current count.

    starter_factor
      Number of traversals requested per missing record.

    achieved
      {cell: number of synthetic records produced so far}.
    """

    def __init__(self, current, targets, starter_factor=1.5, achieved=None):
        self.current = OrderedDict((c, int(current.get(c, 0))) for c in all_cells())
        self.targets = OrderedDict((c, int(targets.get(c, 0))) for c in all_cells())
        for cell in all_cells():
            if self.targets[cell] < self.current[cell]:
                raise ValueError("Target of cell %s is below its current count"
                                 % cell_to_name(cell))
        self.starter_factor = starter_factor
        self.achieved = OrderedDict((c, 0) for c in all_cells())
        if achieved is not None:
            self.achieved.update(achieved)

    @property
    def deficits(self):
        return OrderedDict(
            (cell, self.targets[cell] - self.current[cell]) for cell in all_cells())

    @property
    def requested(self):
        """Number of traversals requested per cell."""
        return OrderedDict(
            (cell, int(math.ceil(self.starter_factor * deficit)))
            for cell, deficit in self.deficits.items()
        )

    def deficit_cells(self):
        return [cell for cell, deficit in self.deficits.items() if deficit > 0]

    @property
    def is_empty(self):
        return len(self.deficit_cells()) == 0

    @property
    def is_achieved(self):
        return all(self.achieved[c] >= self.deficits[c] for c in all_cells())

    def to_dict(self):
        def named(counts):
            return OrderedDict((cell_to_name(c), v) for c, v in counts.items())

        return OrderedDict([
            ("current", named(self.current)),
            ("targets", named(self.targets)),
            ("deficits", named(self.deficits)),
            ("requested", named(self.requested)),
            ("achieved", named(self.achieved)),
            ("starter_factor", self.starter_factor),
        ])

    @staticmethod
    def from_dict(dct):
        def cells(counts):
            return {name_to_cell(name): v for name, v in counts.items()}

        return AugmentationPlan(
            cells(dct["current"]), cells(dct["targets"]),
            starter_factor=dct["starter_factor"],
            achieved=cells(dct["achieved"]),
        )

    def __repr__(self):
        return "AugmentationPlan(deficits %s)" % {
            cell_to_name(c): d for c, d in self.deficits.items() if d}


def plan_augmentation(train, policy="match-subgroup-healthy", explicit=None,
                      starter_factor=1.5):
    """Plan the synthetic records needed to rebalance a training set.

    Parameters
    ----------

    train
      The training Dataset.

    policy
      - "match-subgroup-healthy": each subgroup's AMD cell is filled up to
        that subgroup's healthy count.
      - "match-max-cell": every cell is filled up to the largest cell.
      - "explicit": targets given by ``explicit``, {"AA-1": count} or
        {("AA", 1): count}. Targets below the current count are ignored
        with a warning.

    starter_factor
      Traversals requested per missing record.
    """
    current = train.cell_counts()
    targets = OrderedDict(current)
    if policy == "match-subgroup-healthy":
        for (subgroup, label), count in current.items():
            if label == 1:
                targets[(subgroup, 1)] = max(count, current[(subgroup, 0)])
    elif policy == "match-max-cell":
        largest = max(current.values())
        targets = OrderedDict((cell, largest) for cell in current)
    elif policy == "explicit":
        for cell, count in (explicit or {}).items():
            if isinstance(cell, str):
                cell = name_to_cell(cell)
            if count < current[cell]:
                warnings.warn(
                    "Cell %s: explicit target %d is below the current count %d, "
                    "the cell is left unchanged."
                    % (cell_to_name(cell), count, current[cell])
                )
                continue
            targets[cell] = count
    else:
        raise ValueError("Unknown augmentation policy %s" % policy)
    return AugmentationPlan(current, targets, starter_factor=starter_factor)
