"""Latent traversal: starter selection, gradient trajectories towards a
target label and decoding of the endpoints."""

from .TraversalConfig import (
    TraversalConfig,
    StarterCriteria,
    TRAVERSAL_MODES,
    TRAVERSAL_METRICS,
)
from .Trajectory import Trajectory, TrajectoryState, OUTCOMES, trajectories_dataframe
from .starters import Starter, StarterBudgetError, select_starters, score_styles
from .traversal import (
    TrajectoryRejectedError,
    traverse,
    decode_endpoint,
    traversal_objective,
    backtracking_step_size,
    generator_jacobian,
    generator_metric_direction,
)
