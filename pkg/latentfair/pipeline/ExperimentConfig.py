"""This module implements the ExperimentConfig class holding every knob of
the pipeline."""

import copy
import json
from collections import OrderedDict

from box import Box

from ..synthgen import CellCounts, default_experiment_cells
from ..stylegen import GanTrainConfig
from ..classify import ClassifierTrainConfig
from ..traverse import TraversalConfig, StarterCriteria
from ..fairmetrics import RANKING_CI_METHODS, KAPPA_WEIGHTINGS
from ..parsers import json_from_file
from ..tools import did_you_mean

AUGMENTATION_POLICIES = ("match-subgroup-healthy", "match-max-cell", "explicit")


class ConfigError(ValueError):
    pass


def default_config_dict():
    """Return the nested dict of the default desk-scale experiment."""
    return OrderedDict([
        ("seed", 42),
        ("cells", default_experiment_cells().to_dict()),
        ("mixing", OrderedDict([
            ("noise_scale", 0.05),
            ("nonlinear", False),
            ("offset_scale", 0.5),
            ("pigment_bases", OrderedDict([("C", -1.0), ("AA", 1.0)])),
            ("pigment_jitter", 0.1),
            ("lesion_map", OrderedDict([("1", 0.0), ("2", 0.3), ("3", 1.0),
                                        ("4", 1.5)])),
        ])),
        ("gan", GanTrainConfig().to_dict()),
        ("image_classifier", ClassifierTrainConfig().to_dict()),
        ("latent_classifier", ClassifierTrainConfig().to_dict()),
        ("labeling", OrderedDict([("n", 4096), ("style_mode", "shared")])),
        ("starters", OrderedDict([
            ("min_subgroup_probability", 0.9),
            ("max_disease_probability", 0.1),
            ("budget", None),
        ])),
        ("traversal", TraversalConfig(metric="generator").to_dict()),
        ("augmentation", OrderedDict([
            ("policy", "match-subgroup-healthy"),
            ("explicit", None),
            ("starter_factor", 1.5),
            ("allow_partial", False),
        ])),
        ("diagnostic", ClassifierTrainConfig().to_dict()),
        ("metrics", OrderedDict([
            ("threshold", 0.5),
            ("ranking_ci", "bootstrap"),
            ("bootstrap_samples", 1000),
            ("kappa_weighting", "quadratic"),
        ])),
        ("output_dir", "latentfair_output"),
    ])


# Sections whose keys are cells or map entries, replaced as a whole.
FREE_SECTIONS = ("train", "test", "leftover", "pigment_bases", "lesion_map",
                 "explicit")


def _check_keys(dct, defaults, path=""):
    for key, value in dct.items():
        if key not in defaults:
            raise ConfigError(
                "Unknown config key %s%s. Did you mean one of %s ?"
                % (path, key, did_you_mean(key, list(defaults.keys())))
            )
        if isinstance(value, dict) and isinstance(defaults[key], dict) and (
                key not in FREE_SECTIONS):
            _check_keys(value, defaults[key], path="%s%s." % (path, key))


def _merge(defaults, overrides):
    result = copy.deepcopy(defaults)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict) and (
                key not in FREE_SECTIONS):
            result[key] = _merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


class ExperimentConfig:
    """Full configuration of an experiment.

    Parameters
    ----------

    dct
      Nested dict overriding the defaults (see ``default_config_dict``).
      Unknown keys raise a ConfigError with suggestions.

    Examples
    --------

    >>> config = ExperimentConfig({"seed": 3, "gan": {"steps": 100}})
    >>> config.gan.steps
    100
    """

    def __init__(self, dct=None):
        dct = {} if dct is None else dct
        defaults = default_config_dict()
        _check_keys(dct, defaults)
        self.sections = Box(_merge(defaults, dct))
        self.validate()

    def __getattr__(self, name):
        if name == "sections":
            raise AttributeError(name)
        try:
            return self.sections[name]
        except KeyError:
            raise AttributeError(name)

    def validate(self):
        """Build every sub-config; any invalid value raises ConfigError."""
        try:
            self.cell_counts()
            self.gan_config()
            for name in ("image_classifier", "latent_classifier", "diagnostic"):
                self.classifier_config(name)
            self.traversal_config()
            self.starter_criteria("AA", 0)
        except (ValueError, TypeError) as error:
            raise ConfigError("Invalid configuration: %s" % error)
        if self.augmentation.policy not in AUGMENTATION_POLICIES:
            raise ConfigError("Unknown augmentation policy %s. Did you mean %s ?"
                              % (self.augmentation.policy,
                                 did_you_mean(self.augmentation.policy,
                                              AUGMENTATION_POLICIES)))
        if self.augmentation.policy == "explicit" and not self.augmentation.explicit:
            raise ConfigError("The explicit policy needs augmentation.explicit "
                              "cell counts")
        if self.metrics.ranking_ci not in RANKING_CI_METHODS:
            raise ConfigError("metrics.ranking_ci must be one of %s"
                              % (RANKING_CI_METHODS,))
        if self.metrics.kappa_weighting not in KAPPA_WEIGHTINGS:
            raise ConfigError("metrics.kappa_weighting must be one of %s"
                              % (KAPPA_WEIGHTINGS,))
        if self.labeling.style_mode not in ("shared", "per-scale"):
            raise ConfigError("labeling.style_mode must be shared or per-scale")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("The seed must be a non-negative integer")

    def cell_counts(self):
        return CellCounts.from_dict(self.cells.to_dict())

    def gan_config(self):
        return GanTrainConfig.from_dict(self.gan.to_dict())

    def classifier_config(self, section):
        return ClassifierTrainConfig.from_dict(self.sections[section].to_dict())

    def traversal_config(self):
        return TraversalConfig(**self.traversal.to_dict())

    def starter_criteria(self, subgroup, source_label):
        return StarterCriteria(subgroup=subgroup, source_label=source_label,
                               **self.starters.to_dict())

    def factor_model(self):
        """Return the keyword arguments of gen_population's factor model."""
        return dict(
            pigment_bases=dict(self.mixing.pigment_bases),
            pigment_jitter=self.mixing.pigment_jitter,
            lesion_map={int(k): v for k, v in self.mixing.lesion_map.items()},
        )

    def copy(self, **changes):
        dct = self.to_dict()
        dct.update(changes)
        return ExperimentConfig(dct)

    def to_dict(self):
        return json.loads(json.dumps(self.sections.to_dict()))

    @staticmethod
    def from_dict(dct):
        return ExperimentConfig(dct)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_file(self, filepath):
        with open(filepath, "w") as f:
            f.write(self.to_json())

    @staticmethod
    def from_file(filepath):
        return ExperimentConfig(json_from_file(filepath))

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and (
            self.to_json() == other.to_json())

    def __repr__(self):
        return "ExperimentConfig(seed=%s, output_dir=%s)" % (
            self.seed, self.output_dir)
