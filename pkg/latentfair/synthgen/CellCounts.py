"""Per-(subgroup, label) counts of the train, test and leftover partitions."""

from collections import OrderedDict

from ..tools import all_cells, cell_to_name, name_to_cell

PARTITIONS = ("train", "test", "leftover")

FULL_SCALE_TRAIN_CELLS = {
    ("C", 0): 1843, ("C", 1): 1843, ("AA", 0): 3686, ("AA", 1): 0,
}

FULL_SCALE_TEST_CELLS = {("C", 0): 77, ("C", 1): 77, ("AA", 0): 77, ("AA", 1): 77}

DESK_SCALE_FACTOR = 16


class CellCounts:
    """Counts of records per (subgroup, label) cell for each partition.

    Parameters
    ----------

    train, test, leftover
      Dicts {(subgroup, label): count} or {"AA-1": count}. Missing cells
      count 0.
    """

    def __init__(self, train=None, test=None, leftover=None):
        self.partitions = OrderedDict()
        for name, counts in zip(PARTITIONS, (train, test, leftover)):
            self.partitions[name] = self._normalize(name, counts or {})

    @staticmethod
    def _normalize(partition, counts):
        result = OrderedDict((cell, 0) for cell in all_cells())
        for cell, count in counts.items():
            if isinstance(cell, str):
                cell = name_to_cell(cell)
            if cell not in result:
                raise ValueError("Unknown cell %s in partition %s" % (cell, partition))
            if int(count) != count or count < 0:
                raise ValueError(
                    "Cell %s of partition %s: counts must be non-negative "
                    "integers, got %s" % (cell_to_name(cell), partition, count)
                )
            result[cell] = int(count)
        return result

    @property
    def train(self):
        return self.partitions["train"]

    @property
    def test(self):
        return self.partitions["test"]

    @property
    def leftover(self):
        return self.partitions["leftover"]

    def total(self, partition):
        return sum(self.partitions[partition].values())

    def to_dict(self):
        """Return {"train": {"C-0": 115, ...}, ...}."""
        return OrderedDict(
            (partition, OrderedDict(
                (cell_to_name(cell), count) for cell, count in counts.items()))
            for partition, counts in self.partitions.items()
        )

    @staticmethod
    def from_dict(dct):
        unknown = [k for k in dct if k not in PARTITIONS]
        if unknown:
            raise ValueError("Unknown partitions %s (use %s)" % (unknown, PARTITIONS))
        return CellCounts(**dct)

    def __eq__(self, other):
        return isinstance(other, CellCounts) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "CellCounts(%s)" % ", ".join(
            "%s: %s" % (p, list(c.values())) for p, c in self.partitions.items())


def scaled_cells(counts, factor=DESK_SCALE_FACTOR):
    """Return the counts integer-divided by the factor."""
    return {cell: count // factor for cell, count in counts.items()}


def full_scale_experiment_cells():
    """Return the full-scale design: training table, 77 per test cell,
    614 leftover African American AMD records."""
    return CellCounts(
        train=FULL_SCALE_TRAIN_CELLS, test=FULL_SCALE_TEST_CELLS,
        leftover={("AA", 1): 614},
    )


def default_experiment_cells():
    """Return the desk-scale design.

    Train cells are the full-scale counts divided by 16 ({115, 115, 230, 0}),
    the test partition has 32 records per cell and the leftover partition
    96 African American AMD records.
    """
    return CellCounts(
        train=scaled_cells(FULL_SCALE_TRAIN_CELLS),
        test={cell: 32 for cell in all_cells()},
        leftover={("AA", 1): 96},
    )
