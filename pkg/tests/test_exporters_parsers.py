import os
from collections import OrderedDict

import numpy as np
import pandas as pd
import pytest

from latentfair.ndcore import Rng
from latentfair.synthgen import Dataset, FeatureRecord, MixingModel, gen_population
from latentfair.stylegen import GeneratorModel, DiscriminatorModel, StyleStack
from latentfair.classify import ClassifierModel
from latentfair.traverse import TraversalConfig, traverse, decode_endpoint
from latentfair.fairmetrics import gap_report
from latentfair.exporters import (
    dataset_to_csv,
    factors_to_csv,
    provenance_to_csv,
    model_to_json,
    trajectories_to_csv,
    trajectory_summary_to_csv,
    metrics_reports_dataframe,
    metrics_to_csv,
    gap_to_csv,
    dict_to_json,
    report_to_markdown,
    results_table_rows,
)
from latentfair.parsers import (
    dataset_from_csv,
    factors_from_csv,
    model_from_json,
    json_from_file,
    trajectories_from_csv,
)

mixing = MixingModel.random(Rng(0))
dataset, factors = gen_population({("C", 0): 5, ("AA", 1): 4}, mixing, Rng(1),
                                  name="train")
generator = GeneratorModel(Rng(2))


def linear_classifier(target, index, bias=0.0):
    clf = ClassifierModel(target, "latent", 32, hidden=())
    clf.parameters()["classifier.0.W"][index, 0] = 2.0
    clf.parameters()["classifier.0.b"][0] = bias
    return clf


disease_clf = linear_classifier("disease", 0)
subgroup_clf = linear_classifier("subgroup", 1, bias=3.0)


def make_trajectories():
    return [
        traverse(StyleStack.broadcast(Rng(i).normal(32), 2),
                 TraversalConfig(max_iterations=30), disease_clf, subgroup_clf,
                 subgroup="AA", starter_id=i)
        for i in range(3)
    ]


def test_dataset_from_file(tmpdir):
    path = os.path.join(str(tmpdir), "dataset_train.csv")
    text = dataset_to_csv(dataset, path)
    back = dataset_from_csv(path, name="train")
    assert len(back) == len(dataset)
    assert back.cell_counts() == dataset.cell_counts()
    for record in dataset:
        assert np.array_equal(back[record.id].x, record.x)
        assert back[record.id].severity == record.severity
    assert dataset_to_csv(back) == text


def test_synthetic_provenance_from_file(tmpdir):
    trajectory = traverse(StyleStack.broadcast(np.zeros(32), 2), TraversalConfig(),
                          disease_clf, subgroup_clf, subgroup="AA", starter_id=5)
    synthetic = decode_endpoint(trajectory, generator,
                                record_id=dataset.next_free_id())
    augmented = Dataset(dataset.records + [synthetic], name="augmented")
    dataset_path = os.path.join(str(tmpdir), "dataset_augmented.csv")
    provenance_path = os.path.join(str(tmpdir), "provenance_synthetic.csv")
    dataset_to_csv(augmented, dataset_path)
    provenance_to_csv(augmented, provenance_path)
    assert len(pd.read_csv(provenance_path)) == 1
    back = dataset_from_csv(dataset_path, provenance_filepath=provenance_path)
    record = back[synthetic.id]
    assert record.is_synthetic and record.severity == 0
    assert record.data.starter_id == 5
    assert record.data.p_disease == synthetic.data.p_disease


def test_factors_from_file(tmpdir):
    path = os.path.join(str(tmpdir), "factors_train.csv")
    factors_to_csv(factors, path)
    table = factors_from_csv(path)
    assert list(table.index) == [f.id for f in factors]
    assert list(table.columns[:2]) == ["pigment", "lesion"]


@pytest.mark.parametrize("model", [
    generator,
    DiscriminatorModel(Rng(3)),
    ClassifierModel("subgroup", "image", 64, rng=Rng(4)),
    ClassifierModel("disease", "latent", 64, rng=Rng(5), style_mode="per-scale"),
    mixing,
])
def test_models_from_files(tmpdir, model):
    path = os.path.join(str(tmpdir), "model.json")
    text = model_to_json(model, path)
    back = model_from_json(path)
    assert type(back) == type(model)
    assert model_to_json(back) == text
    assert model_from_json(text).__class__ == model.__class__


def test_generator_keeps_its_mean_style():
    model = GeneratorModel(Rng(6))
    model.update_mean_style(Rng(7).normal((5, 32)))
    back = model_from_json(model_to_json(model))
    assert np.array_equal(back.w_bar, model.w_bar)
    assert back.w_bar_count == 5
    styles = StyleStack.broadcast(Rng(8).normal(32), 2)
    assert np.array_equal(back.generate(styles), model.generate(styles))


def test_model_json_errors():
    with pytest.raises(ValueError):
        model_to_json("not a model")
    with pytest.raises(ValueError):
        model_from_json({"format": "other", "kind": "mixing"})


def test_trajectories_from_files(tmpdir):
    trajectories = make_trajectories()
    states_path = os.path.join(str(tmpdir), "trajectories.csv")
    summary_path = os.path.join(str(tmpdir), "trajectory_summary.csv")
    trajectories_to_csv(trajectories, states_path)
    trajectory_summary_to_csv(trajectories, summary_path)
    back = trajectories_from_csv(states_path, summary_path, num_scales=2)
    assert [t.starter_id for t in back] == [0, 1, 2]
    for original, read in zip(trajectories, back):
        assert read.outcome == original.outcome
        assert read.iterations == original.iterations
        assert read.final.styles == original.final.styles
        assert read.final.p_disease == original.final.p_disease


def make_gap_report(leftover=True):
    labels = np.array([1, 0] * 20)
    subgroups = np.array(["C"] * 20 + ["AA"] * 20)
    rng = Rng(9)
    predictions = OrderedDict([("baseline", rng.uniform(40)),
                               ("adapted", 0.5 * rng.uniform(40) + 0.4 * labels)])
    extra = None
    if leftover:
        extra = ([1, 1, 0], {"baseline": [0.2, 0.9, 0.1],
                             "adapted": [0.8, 0.9, 0.1]})
    return gap_report(predictions, labels, subgroups, leftover=extra,
                      ranking_ci="binomial")


def test_metrics_table():
    metrics = metrics_reports_dataframe(make_gap_report())
    # 2 models x 3 slices x 9 metrics, plus one leftover row per model.
    assert len(metrics) == 2 * 3 * 9 + 2
    assert set(metrics["slice"]) == {"all", "C", "AA", "leftover"}
    assert len(metrics_reports_dataframe(make_gap_report(leftover=False))) == 54


def test_report_rows_and_markdown(tmpdir):
    report = make_gap_report()
    metrics_path = os.path.join(str(tmpdir), "metrics.csv")
    gap_path = os.path.join(str(tmpdir), "gap.csv")
    metrics_to_csv(report, metrics_path)
    gap_to_csv(report, gap_path)
    metrics, gaps = pd.read_csv(metrics_path), pd.read_csv(gap_path)
    rows = results_table_rows(metrics, ["baseline", "adapted"])
    assert len(rows) == 9 + 2 + 1
    assert rows[0][0] == "Accuracy" and rows[-1][0] == "Accuracy (Leftover Set)"
    assert rows[-1][1][1] == "100.00 (0.00)"
    markdown_path = os.path.join(str(tmpdir), "report.md")
    text = report_to_markdown(metrics, gaps, data={"generator_mode": "adversarial"},
                              target=markdown_path)
    assert "| ROCAUC |" in text
    assert "- generator_mode: adversarial" in text
    with open(markdown_path) as f:
        assert f.read() == text


def test_markdown_relative_gap_reduction():
    report = make_gap_report()
    metrics = metrics_reports_dataframe(report)
    gaps = report.to_dataframe()
    gaps["gap"] = [0.2, 0.05]
    gaps["gap_delta"] = 0.15
    gaps["relative_gap_reduction"] = 0.75
    text = report_to_markdown(metrics, gaps)
    assert "- gap delta (baseline - adapted): 15.00 points" in text
    assert "- relative gap reduction: 75.0%" in text
    gaps["relative_gap_reduction"] = np.nan
    assert "relative gap reduction" not in report_to_markdown(metrics, gaps)


def test_dict_to_json(tmpdir):
    path = os.path.join(str(tmpdir), "plan.json")
    dict_to_json({"b": 1, "a": [1, 2]}, path)
    assert json_from_file(path) == {"a": [1, 2], "b": 1}
