"""Image-space and latent-space classifiers."""

from .ClassifierModel import ClassifierModel, TARGETS, SPACES, STYLE_MODES
from .LabeledLatentSet import LabeledLatentSet
from .training import (
    ClassifierTrainConfig,
    SingleClassError,
    fit_classifier,
    train_image_classifier,
    label_synthetics,
    train_latent_classifier,
    latent_inputs,
    calibration_violations,
    agreement,
)
