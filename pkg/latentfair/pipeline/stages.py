"""Augmentation, diagnostic training and evaluation stages of the
experiment."""

from collections import OrderedDict

import numpy as np
import pandas as pd

from ..classify import train_image_classifier
from ..fairmetrics import gap_report
from ..ndcore import Rng
from ..synthgen import Dataset
from ..traverse import StarterBudgetError, select_starters, traverse, decode_endpoint
from ..exporters import (
    dataframe_to_csv,
    metrics_reports_dataframe,
    report_to_markdown,
)
from ..tools import cell_to_name, resolve_logger

PREDICTION_FIELDS = ("model", "partition", "id", "subgroup", "label", "score")


class PartialAugmentationError(ValueError):
    """Raised when fewer synthetic records than planned could be produced."""

    def __init__(self, message, requested=None, achieved=None):
        ValueError.__init__(self, message)
        self.requested = requested
        self.achieved = achieved


class StageError(ValueError):
    """Failure of a pipeline stage, with the artifacts it was working on."""

    def __init__(self, message, stage=None, paths=()):
        ValueError.__init__(self, message)
        self.stage = stage
        self.paths = list(paths)


def run_traversals(plan, generator, disease_clf, subgroup_clf, config, rng,
                   logger=None):
    """Select starters and traverse them for every deficit cell of the plan.

    For a deficit in cell (subgroup, label), starters are sampled in the
    same subgroup with the opposite label, and traversed towards ``label``.
    A cell stops as soon as as many trajectories as its deficit converged,
    or when its requested starters are exhausted.

    Parameters
    ----------

    plan
      The AugmentationPlan.

    generator, disease_clf, subgroup_clf
      Trained GeneratorModel and latent-space classifiers.

    config
      The ExperimentConfig (starter criteria and traversal settings).

    rng
      ndcore Rng; each deficit cell uses its own child stream.

    Returns
    -------

    The list of trajectories of all cells, with distinct starter ids.
    """
    logger = resolve_logger(logger)
    traversal_cfg = config.traversal_config()
    shared_styles = traversal_cfg.mode == "shared"
    trajectories = []
    for i, cell in enumerate(plan.deficit_cells()):
        subgroup, label = cell
        deficit, requested = plan.deficits[cell], plan.requested[cell]
        criteria = config.starter_criteria(subgroup, source_label=1 - label)
        try:
            starters, acceptance_rate = select_starters(
                requested, generator, disease_clf, subgroup_clf,
                criteria=criteria, rng=rng.child(i), shared_styles=shared_styles,
                logger=logger,
            )
        except StarterBudgetError as error:
            starters, acceptance_rate = error.starters, error.acceptance_rate
            logger(message="Cell %s: %s" % (cell_to_name(cell), error))
        logger(message="Cell %s: %d starters (acceptance rate %.3f)"
               % (cell_to_name(cell), len(starters), acceptance_rate))
        cell_cfg = traversal_cfg.copy(target_label=label)
        converged = 0
        for starter in logger.iter_bar(starter=starters):
            if converged >= deficit:
                break
            trajectory = traverse(starter.styles, cell_cfg, disease_clf,
                                  subgroup_clf, subgroup=subgroup,
                                  starter_id=len(trajectories),
                                  generator=generator)
            trajectories.append(trajectory)
            converged += trajectory.converged
        logger(message="Cell %s: %d/%d trajectories converged"
               % (cell_to_name(cell), converged, deficit))
    return trajectories


def apply_traversals(train, plan, trajectories, generator, start_id=None,
                     allow_partial=False, logger=None):
    """Decode the converged trajectories into synthetic records and add
    them to the training set.

    At most ``deficit`` records are added per cell. The plan's ``achieved``
    counts are updated.

    Parameters
    ----------

    start_id
      Id of the first synthetic record (default: the next free id of
      ``train``). Use an id above every partition's ids.

    allow_partial
      If False, a PartialAugmentationError is raised when a cell gets
      fewer records than its deficit.

    Returns
    -------

    A new Dataset "augmented": the original records unchanged, followed by
    the synthetic records.
    """
    logger = resolve_logger(logger)
    record_id = train.next_free_id() if start_id is None else start_id
    synthetic = []
    for cell in plan.deficit_cells():
        subgroup, label = cell
        decoded = 0
        for trajectory in trajectories:
            if decoded == plan.deficits[cell]:
                break
            if not trajectory.converged or (
                    (trajectory.subgroup, trajectory.target_label) != cell):
                continue
            synthetic.append(decode_endpoint(trajectory, generator,
                                             record_id=record_id))
            record_id += 1
            decoded += 1
        plan.achieved[cell] = decoded
    missing = {
        cell_to_name(cell): (plan.deficits[cell], plan.achieved[cell])
        for cell in plan.deficit_cells()
        if plan.achieved[cell] < plan.deficits[cell]
    }
    if missing:
        message = "Partial augmentation, (deficit, achieved) per cell: %s" % (
            missing)
        if not allow_partial:
            raise PartialAugmentationError(
                message,
                requested={c: d for c, (d, a) in missing.items()},
                achieved={c: a for c, (d, a) in missing.items()},
            )
        logger(message=message)
    return Dataset(train.records + synthetic, name="augmented",
                   data={"parent": train.name})


def augment(train, plan, generator, disease_clf, subgroup_clf, config, rng,
            start_id=None, allow_partial=False, logger=None):
    """Rebalance ``train`` according to the plan.

    Returns (augmented dataset, trajectories). An empty plan returns the
    training set unchanged and no trajectories.
    """
    if plan.is_empty:
        return train, []
    trajectories = run_traversals(plan, generator, disease_clf, subgroup_clf,
                                  config, rng, logger=logger)
    augmented = apply_traversals(train, plan, trajectories, generator,
                                 start_id=start_id, allow_partial=allow_partial,
                                 logger=logger)
    return augmented, trajectories


def train_diagnostic(train, cfg=None, rng=None, logger=None):
    """Train the image-space disease classifier compared in the report.

    Baseline and adapted models are trained with this same function, the
    same config and the same rng; only the training set differs.
    """
    rng = Rng(0) if rng is None else rng
    return train_image_classifier(train, "disease", cfg=cfg, rng=rng,
                                  logger=logger)


def predictions_dataframe(models, partitions):
    """Return the scores of each model on each partition.

    Parameters
    ----------

    models
      OrderedDict {model name: image-space ClassifierModel}.

    partitions
      OrderedDict {partition name: Dataset}.
    """
    frames = []
    for model_name, model in models.items():
        for partition_name, dataset in partitions.items():
            frames.append(pd.DataFrame(
                OrderedDict([
                    ("model", model_name),
                    ("partition", partition_name),
                    ("id", dataset.ids()),
                    ("subgroup", dataset.subgroups()),
                    ("label", dataset.labels()),
                    ("score", model.predict_proba(dataset.features())),
                ]),
                columns=PREDICTION_FIELDS,
            ))
    return pd.concat(frames, ignore_index=True)


def evaluate_predictions(predictions, threshold=0.5, ranking_ci="bootstrap",
                         bootstrap_samples=1000, kappa_weighting="quadratic",
                         seed=0):
    """Compute the GapReport of saved predictions.

    The predictions table has the columns of ``predictions_dataframe``;
    the "test" partition is required, "leftover" is optional. Models are
    compared in their order of appearance. The same table and seed always
    give the same report.
    """
    models = list(OrderedDict.fromkeys(predictions["model"]))
    partitions = set(predictions["partition"])
    if "test" not in partitions:
        raise ValueError("The predictions have no test partition (found %s)"
                         % sorted(partitions))

    def partition_rows(model, partition):
        rows = predictions[(predictions["model"] == model)
                           & (predictions["partition"] == partition)]
        return rows.sort_values("id")

    test_rows = partition_rows(models[0], "test")
    scores = OrderedDict(
        (model, partition_rows(model, "test")["score"].values)
        for model in models
    )
    leftover = None
    if "leftover" in partitions:
        leftover_rows = partition_rows(models[0], "leftover")
        leftover = (
            leftover_rows["label"].values,
            {model: partition_rows(model, "leftover")["score"].values
             for model in models},
        )
    return gap_report(
        scores,
        test_rows["label"].values,
        test_rows["subgroup"].astype(str).values,
        leftover=leftover,
        threshold=threshold,
        ranking_ci=ranking_ci,
        bootstrap_samples=bootstrap_samples,
        kappa_weighting=kappa_weighting,
        rng=Rng(seed),
    )


def evaluate_and_report(baseline, adapted, test, leftover, metrics=None,
                        seed=0, data=None, target=None):
    """Compare the baseline and adapted diagnostic models.

    Parameters
    ----------

    baseline, adapted
      The two image-space disease classifiers.

    test, leftover
      The real test and leftover partitions.

    metrics
      Dict of metric settings (threshold, ranking_ci, bootstrap_samples,
      kappa_weighting).

    data
      Dict of run information printed at the end of the report.

    target
      Optional flametree directory where predictions.csv, metrics.csv,
      gap.csv and report.md are written.

    Returns
    -------

    (predictions, gap_report, report_text)
    """
    for name, partition in [("test", test), ("leftover", leftover)]:
        if partition is None or len(partition) == 0:
            raise ValueError("The %s partition is missing or empty" % name)
    leaks = synthetic_leaks(test, leftover)
    if leaks:
        raise ValueError("Synthetic records found in %s" % leaks)
    predictions = predictions_dataframe(
        OrderedDict([("baseline", baseline), ("adapted", adapted)]),
        OrderedDict([("test", test), ("leftover", leftover)]),
    )
    return report_predictions(predictions, metrics=metrics, seed=seed,
                              data=data, target=target)


def report_predictions(predictions, metrics=None, seed=0, data=None,
                       target=None):
    """Evaluate saved predictions, render the report and write the tables
    into the flametree directory ``target`` if provided."""
    report = evaluate_predictions(predictions, seed=seed, **dict(metrics or {}))
    metrics_table = metrics_reports_dataframe(report)
    gaps_table = report.to_dataframe()
    text = report_to_markdown(metrics_table, gaps_table, data=data)
    if target is not None:
        target._file("predictions.csv").write(dataframe_to_csv(predictions))
        target._file("metrics.csv").write(dataframe_to_csv(metrics_table))
        target._file("gap.csv").write(dataframe_to_csv(gaps_table))
        target._file("report.md").write(text)
    return predictions, report, text


def synthetic_leaks(*datasets):
    """Return the names of the datasets containing synthetic records."""
    return [d.name for d in datasets
            if any(record.is_synthetic for record in d)]


def same_configs(model_a, model_b):
    """True if two classifiers were trained with identical settings."""
    return model_a.training_config == model_b.training_config and np.array_equal(
        model_a.hidden, model_b.hidden)
