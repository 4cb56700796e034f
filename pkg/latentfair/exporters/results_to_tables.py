"""Export trajectories, training logs and evaluation results."""

import json
from collections import OrderedDict

import pandas

from ..traverse import trajectories_dataframe
from .dataset_to_tables import dataframe_to_csv

TRAJECTORY_SUMMARY_FIELDS = (
    "starter_id",
    "subgroup",
    "target_label",
    "outcome",
    "iterations",
    "p_disease_start",
    "p_disease_end",
)


def trajectories_to_csv(trajectories, filepath=None):
    """Return (and optionally write) the CSV with one row per trajectory
    state: starter_id, iter, p_disease, p_subgroup, objective, w0..."""
    return dataframe_to_csv(trajectories_dataframe(trajectories), filepath)


def trajectory_summary_dataframe(trajectories):
    """Return one row per trajectory with its outcome and the disease
    probabilities of its first and last states."""
    return pandas.DataFrame(
        [
            OrderedDict([
                ("starter_id", t.starter_id),
                ("subgroup", t.subgroup),
                ("target_label", t.target_label),
                ("outcome", t.outcome),
                ("iterations", t.iterations),
                ("p_disease_start", t.initial.p_disease),
                ("p_disease_end", t.final.p_disease),
            ])
            for t in trajectories
        ],
        columns=TRAJECTORY_SUMMARY_FIELDS,
    )


def trajectory_summary_to_csv(trajectories, filepath=None):
    return dataframe_to_csv(trajectory_summary_dataframe(trajectories), filepath)


def metrics_reports_dataframe(gap_report):
    """Return the metrics table: one row per (model, slice, metric) with
    value, halfwidth and n. Leftover accuracies use the slice "leftover"."""
    frames = [
        report.to_dataframe(model=model, slice_name=slice_name)
        for model, slices in gap_report.reports.items()
        for slice_name, report in slices.items()
    ]
    if gap_report.leftover is not None:
        frames.append(pandas.DataFrame(
            [
                OrderedDict([
                    ("model", model), ("slice", "leftover"),
                    ("metric", "accuracy"), ("value", entry["value"]),
                    ("halfwidth", entry["halfwidth"]), ("n", entry["n"]),
                ])
                for model, entry in gap_report.leftover.items()
            ]
        ))
    return pandas.concat(frames, ignore_index=True)


def metrics_to_csv(gap_report, filepath=None):
    return dataframe_to_csv(metrics_reports_dataframe(gap_report), filepath)


def gap_to_csv(gap_report, filepath=None):
    return dataframe_to_csv(gap_report.to_dataframe(), filepath)


def dict_to_json(dct, filepath=None):
    """Return (and optionally write) a JSON document with sorted keys."""
    text = json.dumps(dct, sort_keys=True, indent=1)
    if filepath is not None:
        with open(filepath, "w") as f:
            f.write(text)
    return text
