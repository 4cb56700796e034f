import numpy as np
import pytest

from latentfair.ndcore import Rng
from latentfair.synthgen import (
    CellCounts,
    Dataset,
    FeatureRecord,
    MixingModel,
    UnsupportedModeError,
    default_experiment_cells,
    full_scale_experiment_cells,
    gen_population,
    gen_partitions,
    probe_separability,
    separability_check,
    recover_factors,
)

mixing = MixingModel.random(Rng(1), noise_scale=0.05)
partitions = gen_partitions(default_experiment_cells(), mixing, Rng(2))
train, train_factors = partitions["train"]
test, test_factors = partitions["test"]
leftover, _ = partitions["leftover"]


def test_mixing_is_orthonormal():
    assert mixing.orthonormality_error() < 1e-10
    assert mixing.M.shape == (64, 10)


def test_default_cells():
    cells = default_experiment_cells()
    assert list(cells.train.values()) == [115, 115, 230, 0]
    assert list(cells.test.values()) == [32, 32, 32, 32]
    assert cells.total("leftover") == 96
    assert full_scale_experiment_cells().train[("AA", 0)] == 3686


def test_partition_counts_are_exact():
    assert train.cell_counts() == default_experiment_cells().train
    assert test.cell_counts() == default_experiment_cells().test
    assert leftover.cell_counts()[("AA", 1)] == 96
    assert len(leftover) == 96


def test_partitions_ids_are_disjoint():
    ids = [set(d.ids()) for d in (train, test, leftover)]
    assert not (ids[0] & ids[1]) and not (ids[0] & ids[2]) and not (ids[1] & ids[2])
    assert all(record.source == "real" for d in (train, test, leftover) for record in d)


def test_labels_follow_severities():
    for record in train:
        assert record.label == int(record.severity >= 3)


def test_factor_recovery():
    recovered = recover_factors(train.features(), mixing)
    truth = np.array([f.vector() for f in train_factors])
    # Error of M^T noise, about noise_scale per factor.
    assert np.abs(recovered - truth).max() < 0.05 * 6


def test_noiseless_recovery_is_exact():
    noiseless = MixingModel(mixing.M, mixing.b, noise_scale=0)
    dataset, factors = gen_population({("C", 0): 5}, noiseless, Rng(3))
    truth = np.array([f.vector() for f in factors])
    assert np.allclose(noiseless.recover_factors(dataset.features()), truth,
                       atol=1e-10)


def test_nonlinear_mode_disables_recovery():
    nonlinear = MixingModel.random(Rng(1), nonlinear=True)
    with pytest.raises(UnsupportedModeError):
        nonlinear.recover_factors(np.zeros(64))


def test_generation_is_deterministic():
    other_train, _ = gen_partitions(default_experiment_cells(), mixing, Rng(2))["train"]
    assert np.array_equal(other_train.features(), train.features())


def test_empty_population():
    dataset, factors = gen_population({}, mixing, Rng(0))
    assert len(dataset) == 0 and factors == []


def test_negative_counts():
    with pytest.raises(ValueError):
        CellCounts(train={("C", 0): -1})
    with pytest.raises(ValueError):
        gen_population({("C", 0): -1}, mixing, Rng(0))


def test_probe_separability():
    balanced_cells = CellCounts(train={c: 100 for c in default_experiment_cells().test},
                                test={c: 50 for c in default_experiment_cells().test})
    parts = gen_partitions(balanced_cells, mixing, Rng(4))
    probe = probe_separability(parts["train"][0], parts["test"][0])
    assert probe.disease_accuracy > 0.9
    assert probe.subgroup_accuracy > 0.95


def test_separability_check_on_balanced_draws():
    probe = separability_check(mixing, Rng(5), n_per_cell=100)
    assert probe.passed
    assert probe.disease_accuracy > 0.9
    assert probe.subgroup_accuracy > 0.95
    unreachable = separability_check(mixing, Rng(5), n_per_cell=100,
                                     thresholds={"disease": 1.0})
    assert not unreachable.passed


def test_dataset_helpers():
    assert train.targets("subgroup").sum() == 230
    aa = train.restricted_to(lambda r: r.subgroup == "AA")
    assert len(aa) == 230
    groups = dict(train.records_grouped_by("subgroup"))
    assert len(groups["C"]) == 230
    assert train.next_free_id() == 460
    with pytest.raises(ValueError):
        Dataset(train.records[:1] + train.records[:1])


def test_feature_record_validation():
    with pytest.raises(ValueError):
        FeatureRecord(0, "C", 1, 0, "fake", np.zeros(64))
    with pytest.raises(ValueError):
        FeatureRecord(0, "C", 1, 2, "real", np.zeros(64))
