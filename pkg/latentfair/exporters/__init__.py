"""Exporters writing datasets, models and results to files."""

from .dataset_to_tables import (
    dataframe_to_csv,
    dataset_to_dataframe,
    dataset_to_csv,
    factors_to_dataframe,
    factors_to_csv,
    provenance_to_csv,
)
from .model_to_json import model_to_dict, model_to_json, WEIGHTS_FORMAT
from .results_to_tables import (
    trajectories_to_csv,
    trajectory_summary_dataframe,
    trajectory_summary_to_csv,
    metrics_reports_dataframe,
    metrics_to_csv,
    gap_to_csv,
    dict_to_json,
)
from .report_to_markdown import report_to_markdown, results_table_rows
