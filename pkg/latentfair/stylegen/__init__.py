"""Style-based generative model: mapping network, style-modulated
multi-scale generator, discriminator and trainers."""

from .GeneratorModel import (
    GeneratorModel,
    StyleStack,
    StateError,
    map_latent,
    generate,
    truncate,
    sample_styles,
    sample_fakes,
)
from .DiscriminatorModel import DiscriminatorModel
from .training import (
    GanTrainConfig,
    TrainingResult,
    DivergenceError,
    TRAINER_MODES,
    train_gan,
    train_reconstruction,
    train_generator,
    moment_distance,
    discriminator_accuracy,
    coordinates_within_standard_errors,
    generator_quality,
)
