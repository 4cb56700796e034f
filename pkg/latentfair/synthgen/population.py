"""Generation of the synthetic cohort partitions."""

from collections import OrderedDict

import numpy as np
from box import Box
from sklearn.linear_model import LogisticRegression

from .records import FactorRecord, FeatureRecord, SEVERITY_TO_LESION, PIGMENT_BASES
from .Dataset import Dataset
from .CellCounts import PARTITIONS
from ..tools import all_cells

SEVERITIES_PER_LABEL = {0: (1, 2), 1: (3, 4)}

N_NUISANCE = 8


def gen_population(cells, mixing, rng, start_id=0, name=None,
                   pigment_bases=None, pigment_jitter=0.1, lesion_map=None):
    """Generate exactly the requested number of records per cell.

    Parameters
    ----------

    cells
      Dict {(subgroup, label): count}.

    mixing
      The MixingModel turning factors into features.

    rng
      ndcore Rng. Within a label class, severities are drawn uniformly
      from the class's severity pair.

    start_id
      Id of the first record, the following ids are consecutive.

    pigment_bases, pigment_jitter, lesion_map
      Factor model constants (defaults: C -1.0 / AA +1.0, jitter 0.1,
      severity 1..4 -> lesion 0.0, 0.3, 1.0, 1.5).

    Returns
    -------

    (dataset, factors)
      A Dataset of "real" FeatureRecords and the list of the corresponding
      FactorRecords (same ids, same order).
    """
    pigment_bases = PIGMENT_BASES if pigment_bases is None else pigment_bases
    lesion_map = SEVERITY_TO_LESION if lesion_map is None else lesion_map
    for cell, count in cells.items():
        if count < 0:
            raise ValueError("Negative count %d for cell %s" % (count, cell))
    factors = []
    record_id = start_id
    for cell in all_cells():
        subgroup, label = cell
        count = cells.get(cell, 0)
        if count == 0:
            continue
        severities = np.array(SEVERITIES_PER_LABEL[label])[rng.integers(0, 2, count)]
        jitters = (2 * rng.uniform(count) - 1) * pigment_jitter
        nuisances = rng.normal((count, N_NUISANCE))
        for severity, jitter, nuisance in zip(severities, jitters, nuisances):
            factors.append(FactorRecord(
                id=record_id,
                subgroup=subgroup,
                pigment=pigment_bases[subgroup] + jitter,
                severity=int(severity),
                lesion=lesion_map[int(severity)],
                nuisance=nuisance,
            ))
            record_id += 1
    if len(factors) == 0:
        return Dataset([], name=name), []
    features = mixing.mix(np.array([f.vector() for f in factors]), rng=rng)
    records = [
        FeatureRecord(id=f.id, subgroup=f.subgroup, severity=f.severity,
                      label=f.label, source="real", x=x)
        for f, x in zip(factors, features)
    ]
    return Dataset(records, name=name), factors


def gen_partitions(cell_counts, mixing, rng, **factor_model):
    """Generate the train, test and leftover partitions.

    Each partition uses its own stream of ``rng`` and ids never overlap
    between partitions. Returns an OrderedDict
    {partition: (dataset, factors)}.
    """
    result = OrderedDict()
    start_id = 0
    for i, partition in enumerate(PARTITIONS):
        dataset, factors = gen_population(
            cell_counts.partitions[partition],
            mixing,
            rng.child(i),
            start_id=start_id,
            name=partition,
            **factor_model
        )
        result[partition] = (dataset, factors)
        start_id += cell_counts.total(partition)
    return result


def probe_separability(train, test):
    """Train logistic probes on ``train`` features, return their accuracy
    on ``test`` for the disease label and the subgroup.

    If the factors are not learnable from the features the whole experiment
    is vacuous; expect > 0.9 (label) and > 0.95 (subgroup) on balanced data.
    """
    result = Box()
    for target in ("disease", "subgroup"):
        probe = LogisticRegression(max_iter=2000)
        probe.fit(train.features(), train.targets(target))
        result[target + "_accuracy"] = float(
            probe.score(test.features(), test.targets(target)))
    return result


SEPARABILITY_THRESHOLDS = OrderedDict([("disease", 0.9), ("subgroup", 0.95)])


def separability_check(mixing, rng, n_per_cell=200, thresholds=None,
                       **factor_model):
    """Probe the separability of the factors on balanced populations.

    Draws a balanced training population (``n_per_cell`` records per cell)
    and a balanced test population (half as many), runs
    ``probe_separability`` on them and adds ``passed``: whether every
    accuracy exceeds its threshold in ``thresholds`` (default: 0.9 for the
    disease, 0.95 for the subgroup).
    """
    thresholds = SEPARABILITY_THRESHOLDS if thresholds is None else thresholds
    train, _ = gen_population(
        {cell: n_per_cell for cell in all_cells()}, mixing, rng.child(0),
        name="balanced_train", **factor_model)
    test, _ = gen_population(
        {cell: n_per_cell // 2 for cell in all_cells()}, mixing, rng.child(1),
        start_id=len(train), name="balanced_test", **factor_model)
    result = probe_separability(train, test)
    result.passed = all(result[target + "_accuracy"] > threshold
                        for target, threshold in thresholds.items())
    return result
