"""Read trajectories and labeled latent sets back from CSV files."""

import pandas as pd

from ..stylegen import StyleStack
from ..classify import LabeledLatentSet
from ..traverse import Trajectory, TrajectoryState


def trajectories_from_csv(filepath, summary_filepath, num_scales):
    """Rebuild the trajectories written by ``trajectories_to_csv``, with
    their outcome, subgroup and target label from the summary CSV."""
    states_table = pd.read_csv(filepath)
    summary = pd.read_csv(summary_filepath, dtype={"subgroup": str})
    w_columns = sorted([c for c in states_table.columns if c.startswith("w")],
                       key=lambda c: int(c[1:]))
    trajectories = []
    for row in summary.to_dict(orient="records"):
        rows = states_table[states_table["starter_id"] == row["starter_id"]]
        states = [
            TrajectoryState(
                int(state["iter"]),
                StyleStack.from_vector([state[c] for c in w_columns], num_scales,
                                       mode="per-scale"),
                state["p_disease"],
                state["p_subgroup"],
                state["objective"],
            )
            for state in rows.sort_values("iter").to_dict(orient="records")
        ]
        trajectories.append(Trajectory(
            int(row["starter_id"]), states, row["outcome"],
            subgroup=row["subgroup"], target_label=int(row["target_label"]),
        ))
    return trajectories


def labeled_latent_set_from_csv(filepath, num_scales, target):
    """Read a labeled latent set (soft, hard, w0...)."""
    return LabeledLatentSet.from_dataframe(pd.read_csv(filepath), num_scales,
                                           target)
