"""Synthetic stand-in for the retinal cohort: a ground-truth factor model
mixed into 64-dim observations, with builders for imbalanced partitions."""

from .records import (
    FactorRecord,
    FeatureRecord,
    SEVERITY_TO_LESION,
    PIGMENT_BASES,
)
from .Dataset import Dataset
from .MixingModel import MixingModel, UnsupportedModeError, recover_factors
from .CellCounts import (
    CellCounts,
    default_experiment_cells,
    full_scale_experiment_cells,
    scaled_cells,
)
from .population import (
    gen_population,
    gen_partitions,
    probe_separability,
    separability_check,
    SEPARABILITY_THRESHOLDS,
)
