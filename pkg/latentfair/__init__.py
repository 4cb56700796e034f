from .synthgen import Dataset, FeatureRecord, MixingModel, gen_partitions
from .stylegen import GeneratorModel, StyleStack, train_generator
from .classify import ClassifierModel, LabeledLatentSet, train_image_classifier
from .traverse import TraversalConfig, Trajectory, traverse, select_starters
from .fairmetrics import metrics_report, gap_report
from .pipeline import ExperimentConfig, ExperimentRun, run_all

from .version import __version__
