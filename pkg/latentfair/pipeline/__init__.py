"""Orchestration of the experiment: configuration, augmentation planning,
stage runner with persisted artifacts, and the command line."""

from .ExperimentConfig import (
    ExperimentConfig,
    ConfigError,
    AUGMENTATION_POLICIES,
    default_config_dict,
)
from .AugmentationPlan import AugmentationPlan, plan_augmentation
from .RunManifest import RunManifest, MANIFEST_FILENAME
from .stages import (
    PartialAugmentationError,
    StageError,
    run_traversals,
    apply_traversals,
    augment,
    train_diagnostic,
    predictions_dataframe,
    evaluate_predictions,
    evaluate_and_report,
    report_predictions,
    synthetic_leaks,
    same_configs,
)
from .ExperimentRun import ExperimentRun, run_all, STAGES, VARIANTS
