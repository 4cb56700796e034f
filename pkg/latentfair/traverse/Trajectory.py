"""Recorded latent trajectories."""

import numpy as np
import pandas as pd

OUTCOMES = ("converged", "max-iters", "diverged")


class TrajectoryState:
    """One recorded point of a trajectory."""

    def __init__(self, iteration, styles, p_disease, p_subgroup, objective):
        self.iteration = iteration
        self.styles = styles
        self.p_disease = float(p_disease)
        self.p_subgroup = float(p_subgroup)
        self.objective = float(objective)

    def __repr__(self):
        return "State(%d, p_disease=%.3f, p_subgroup=%.3f, f=%.4f)" % (
            self.iteration, self.p_disease, self.p_subgroup, self.objective)


class Trajectory:
    """Ordered states of a traversal, with its outcome.

    Parameters
    ----------

    starter_id
      Index of the starter sample the trajectory starts from.

    states
      List of TrajectoryState, iterations strictly increasing, the first
      one (iteration 0) being the starter.

    outcome
      "converged", "max-iters" or "diverged".

    subgroup
      Subgroup of the starter ("AA" or "C").

    target_label
      Label the traversal imparts.
    """

    def __init__(self, starter_id, states, outcome, subgroup="AA", target_label=1):
        if outcome not in OUTCOMES:
            raise ValueError("Unknown outcome %s" % outcome)
        self.starter_id = starter_id
        self.states = states
        self.outcome = outcome
        self.subgroup = subgroup
        self.target_label = target_label

    @property
    def initial(self):
        return self.states[0]

    @property
    def final(self):
        return self.states[-1]

    @property
    def iterations(self):
        return self.final.iteration

    @property
    def converged(self):
        return self.outcome == "converged"

    def objectives(self):
        return np.array([state.objective for state in self.states])

    def to_dataframe(self):
        """Return a DataFrame with columns starter_id, iter, p_disease,
        p_subgroup, objective, w0... (the flattened style stack)."""
        rows = []
        for state in self.states:
            row = [self.starter_id, state.iteration, state.p_disease,
                   state.p_subgroup, state.objective]
            rows.append(row + list(state.styles.vector("per-scale")))
        width = len(rows[0]) - 5
        columns = ["starter_id", "iter", "p_disease", "p_subgroup", "objective"]
        return pd.DataFrame(rows, columns=columns + ["w%d" % i for i in range(width)])

    def __repr__(self):
        return "Trajectory(starter %s, %d iterations, %s)" % (
            self.starter_id, self.iterations, self.outcome)


def trajectories_dataframe(trajectories):
    """Concatenate the DataFrames of several trajectories."""
    frames = [trajectory.to_dataframe() for trajectory in trajectories]
    if len(frames) == 0:
        return pd.DataFrame(
            columns=["starter_id", "iter", "p_disease", "p_subgroup", "objective"])
    return pd.concat(frames, ignore_index=True)
