"""Parsers for getting datasets, models and results back from files."""

from .dataset_from_csv import (
    dataset_from_dataframe,
    dataset_from_csv,
    factors_from_csv,
)
from .model_from_json import model_from_json, json_from_file
from .trajectories_from_csv import (
    trajectories_from_csv,
    labeled_latent_set_from_csv,
)
