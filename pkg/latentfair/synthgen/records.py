"""Records of the synthetic cohort: ground-truth factors and observations."""

import numpy as np
from box import Box

from ..tools import subgroup_code

SEVERITY_TO_LESION = {1: 0.0, 2: 0.3, 3: 1.0, 4: 1.5}

PIGMENT_BASES = {"C": -1.0, "AA": 1.0}

SOURCES = ("real", "synthetic")


class FactorRecord:
    """Ground-truth generative factors of one subject.

    Parameters
    ----------

    id
      Unique integer shared with the FeatureRecord of the subject.

    subgroup
      "C" or "AA".

    pigment
      Subgroup base (C: -1.0, AA: +1.0) plus a small jitter.

    severity
      Integer 1..4 (AMD scale). The label is 1 iff severity >= 3.

    lesion
      Lesion intensity, given by the severity-to-intensity map.

    nuisance
      8 standard-normal values, the stand-in for vasculature and other
      image markers.
    """

    def __init__(self, id, subgroup, pigment, severity, lesion, nuisance):
        self.id = int(id)
        self.subgroup = subgroup_code(subgroup)
        self.pigment = float(pigment)
        self.severity = int(severity)
        self.lesion = float(lesion)
        self.nuisance = np.asarray(nuisance, dtype=float)
        if (self.pigment > 0) != (self.subgroup == "AA"):
            raise ValueError(
                "Record %d: pigment %.3f does not match subgroup %s"
                % (self.id, self.pigment, self.subgroup)
            )

    @property
    def label(self):
        return int(self.severity >= 3)

    def vector(self):
        """Return the factor vector [pigment, lesion, nuisance_0..7]."""
        return np.concatenate([[self.pigment, self.lesion], self.nuisance])

    def to_dict(self):
        return dict(
            [["id", self.id], ["pigment", self.pigment], ["lesion", self.lesion]]
            + [["v%d" % i, v] for i, v in enumerate(self.nuisance)]
        )

    def __repr__(self):
        return "FactorRecord(%d, %s, severity=%d)" % (
            self.id, self.subgroup, self.severity)


class FeatureRecord:
    """One observation: the 64-dim feature vector standing in for a fundus
    image, with its tags.

    Parameters
    ----------

    id
      Unique integer.

    subgroup
      "C" or "AA".

    severity
      1..4 for real records, 0 for synthetic records (not assigned).

    label
      1 for referable AMD, 0 for healthy.

    source
      "real" or "synthetic".

    x
      The feature vector.

    data
      A dict of extra information (e.g. provenance of synthetic records).
    """

    def __init__(self, id, subgroup, severity, label, source, x, data=None):
        if source not in SOURCES:
            raise ValueError("Record source must be one of %s, got %s"
                             % (SOURCES, source))
        if label not in (0, 1):
            raise ValueError("Record %s: label must be 0 or 1, got %s" % (id, label))
        self.id = int(id)
        self.subgroup = subgroup_code(subgroup)
        self.severity = int(severity)
        self.label = int(label)
        self.source = source
        self.x = np.asarray(x, dtype=float)
        self.data = Box({} if data is None else data)

    @property
    def cell(self):
        """Return (subgroup, label), e.g. ("AA", 1)."""
        return (self.subgroup, self.label)

    @property
    def is_synthetic(self):
        return self.source == "synthetic"

    def to_dict(self):
        return dict(
            [
                ["id", self.id],
                ["subgroup", self.subgroup],
                ["severity", self.severity],
                ["label", self.label],
                ["source", self.source],
            ]
            + [["x%d" % i, v] for i, v in enumerate(self.x)]
        )

    def __repr__(self):
        return "(%s-%d %s/%d)" % (self.source, self.id, self.subgroup, self.label)
