"""This module implements the Dataset class, a collection of FeatureRecords
with the (subgroup, label) cell bookkeeping used throughout the pipeline.
"""

from collections import OrderedDict

import numpy as np
from box import Box

from ..tools import all_cells


class Dataset:
    """Ordered collection of FeatureRecords.

    Parameters
    ----------

    records
      List of FeatureRecord objects. Record ids must be unique.

    name
      Name of the dataset, e.g. "train".

    data
      A dict with some infos on the dataset.
    """

    def __init__(self, records=(), name=None, data=None):
        self.records = list(records)
        self.name = name
        self.data = Box({} if data is None else data)
        self._index = OrderedDict()
        for record in self.records:
            if record.id in self._index:
                raise ValueError(
                    "Record id %d appears twice in dataset %s" % (record.id, name)
                )
            self._index[record.id] = record

    def __getitem__(self, record_id):
        """Return the record with the given id."""
        return self._index[record_id]

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __contains__(self, record_id):
        return record_id in self._index

    def ids(self):
        return [record.id for record in self.records]

    def features(self):
        """Return the (n, 64) matrix of feature vectors."""
        if len(self.records) == 0:
            return np.zeros((0, 0))
        return np.array([record.x for record in self.records])

    def labels(self):
        return np.array([record.label for record in self.records], dtype=int)

    def subgroups(self):
        return np.array([record.subgroup for record in self.records])

    def targets(self, target="disease"):
        """Return the 0/1 target vector: the disease label, or for target
        "subgroup", 1 for African American records."""
        if target == "disease":
            return self.labels()
        elif target == "subgroup":
            return (self.subgroups() == "AA").astype(int)
        raise ValueError("target must be disease or subgroup, not %s" % target)

    def records_satisfying(self, condition):
        """Return the records for which ``condition(record)`` is true."""
        return [record for record in self.records if condition(record)]

    def restricted_to(self, condition, name=None):
        """Return a new dataset with the records satisfying the condition."""
        return Dataset(
            self.records_satisfying(condition),
            name=self.name if name is None else name,
            data={"parent": self.name},
        )

    def records_grouped_by(self, field=None, key=None, sort_keys=False):
        """Return [(key, records)] grouping records by a field or a function
        ``key(record)``, keys in order of first occurence."""
        if key is None:

            def key(record):
                return getattr(record, field)

        groups = OrderedDict()
        for record in self.records:
            groups.setdefault(key(record), []).append(record)
        keys = sorted(groups.keys()) if sort_keys else groups.keys()
        return [(k, groups[k]) for k in keys]

    def cell_counts(self):
        """Return an OrderedDict {(subgroup, label): count} over all four
        cells (zero counts included)."""
        counts = OrderedDict((cell, 0) for cell in all_cells())
        for record in self.records:
            counts[record.cell] += 1
        return counts

    def count_sources(self):
        counts = OrderedDict([("real", 0), ("synthetic", 0)])
        for record in self.records:
            counts[record.source] += 1
        return counts

    def next_free_id(self):
        return (max(self._index) + 1) if self._index else 0

    def __repr__(self):
        return "Dataset(%s, %d records)" % (self.name, len(self.records))
