"""This module implements the ExperimentRun class, which runs the stages of
an experiment and persists their artifacts in an output directory."""

import os
import time
import warnings
from collections import OrderedDict

import flametree
import pandas as pd

from ..ndcore import Rng
from ..synthgen import MixingModel, gen_partitions, separability_check
from ..stylegen import sample_styles, train_generator
from ..classify import (
    train_image_classifier,
    label_synthetics,
    train_latent_classifier,
    TARGETS,
)
from ..exporters import (
    dataframe_to_csv,
    dataset_to_csv,
    factors_to_csv,
    provenance_to_csv,
    model_to_json,
    trajectories_to_csv,
    trajectory_summary_to_csv,
    dict_to_json,
)
from ..parsers import (
    dataset_from_csv,
    model_from_json,
    json_from_file,
    trajectories_from_csv,
    labeled_latent_set_from_csv,
)
from ..tools import did_you_mean, cell_to_name, human_duration, resolve_logger
from .AugmentationPlan import AugmentationPlan, plan_augmentation
from .RunManifest import RunManifest, MANIFEST_FILENAME
from .stages import (
    StageError,
    run_traversals,
    apply_traversals,
    train_diagnostic,
    evaluate_and_report,
    report_predictions,
    same_configs,
)

PARTITIONS = ("train", "test", "leftover")
VARIANTS = ("baseline", "adapted")

# Files each stage must leave in the output directory.
STAGES = OrderedDict([
    ("synth", ["model_mixing.json"]
     + ["dataset_%s.csv" % p for p in PARTITIONS]
     + ["factors_%s.csv" % p for p in PARTITIONS]),
    ("train-gen", ["model_generator.json", "gan_log.csv"]),
    ("train-clf-image", ["model_image_%s.json" % t for t in TARGETS]),
    ("label", ["latents_labeled_%s.csv" % t for t in TARGETS]),
    ("train-clf-latent", ["model_latent_%s.json" % t for t in TARGETS]),
    ("traverse", ["trajectories.csv", "trajectory_summary.csv",
                  "augmentation_plan.json"]),
    ("augment", ["dataset_augmented.csv", "provenance_synthetic.csv",
                 "augmentation_result.json"]),
    ("train-diag", ["model_diagnostic_%s.json" % v for v in VARIANTS]),
    ("evaluate", ["predictions.csv", "metrics.csv", "gap.csv", "report.md"]),
])

# Outside of STAGES: rerenders the evaluation tables from predictions.csv.
REPORT_ARTIFACTS = ["metrics.csv", "gap.csv", "report.md"]

OPTIONAL_ARTIFACTS = ("model_discriminator.json",)


class ExperimentRun:
    """Stages of an experiment sharing an output directory.

    Artifacts produced by a stage are written to the directory and kept in
    memory; artifacts of stages run previously are read back from their
    files when first needed.

    Parameters
    ----------

    config
      An ExperimentConfig.

    output_dir
      Directory of the artifacts (default: ``config.output_dir``).

    allow_partial
      If True, a partial augmentation is reported but the run goes on.

    logger
      None for no logging, 'bar' for progress bars, or a proglog logger.

    Examples
    --------

    >>> run = ExperimentRun(ExperimentConfig({"gan": {"steps": 200}}))
    >>> manifest = run.run()
    >>> print(run.verify())
    []
    """

    def __init__(self, config, output_dir=None, allow_partial=None, logger=None):
        self.config = config
        self.directory = config.output_dir if output_dir is None else output_dir
        self.root = flametree.file_tree(self.directory)
        if allow_partial is None:
            allow_partial = config.augmentation.allow_partial
        self.allow_partial = allow_partial
        self.logger = resolve_logger(logger)
        self.rng = Rng(config.seed)
        manifest_path = os.path.join(self.directory, MANIFEST_FILENAME)
        if os.path.exists(manifest_path):
            self.manifest = RunManifest.from_file(manifest_path)
            self.manifest.config = config.to_dict()
        else:
            self.manifest = RunManifest(config.to_dict())
        self._cache = {}

    # ARTIFACTS

    def path(self, filename):
        return os.path.join(self.directory, filename)

    def has_artifacts(self, stage):
        return all(os.path.exists(self.path(f)) for f in STAGES[stage])

    def missing_artifacts(self, stage):
        return [f for f in STAGES[stage] if not os.path.exists(self.path(f))]

    def _write(self, filename, content):
        self.root._file(filename).write(content)

    def artifact(self, key):
        """Return an artifact, from memory or from its file.

        Keys: "mixing", "train", "test", "leftover", "generator",
        "image_disease", "image_subgroup", "latents_disease",
        "latents_subgroup", "latent_disease", "latent_subgroup", "plan",
        "trajectories", "augmented", "baseline", "adapted", "predictions".
        """
        if key not in self._cache:
            self._cache[key] = self._load(key)
        return self._cache[key]

    def _load(self, key):
        loaders = OrderedDict([
            ("mixing", ("model_mixing.json", model_from_json)),
            ("generator", ("model_generator.json", model_from_json)),
            ("plan", ("augmentation_plan.json",
                      lambda f: AugmentationPlan.from_dict(json_from_file(f)))),
            ("predictions", ("predictions.csv",
                             lambda f: pd.read_csv(f, dtype={"subgroup": str}))),
            ("augmented", ("dataset_augmented.csv", lambda f: dataset_from_csv(
                f, name="augmented",
                provenance_filepath=self.path("provenance_synthetic.csv")))),
            ("trajectories", ("trajectories.csv", lambda f: trajectories_from_csv(
                f, self.path("trajectory_summary.csv"),
                self.artifact("generator").num_scales))),
        ])
        for partition in PARTITIONS:
            loaders[partition] = (
                "dataset_%s.csv" % partition,
                lambda f, p=partition: dataset_from_csv(f, name=p))
        for target in TARGETS:
            for space in ("image", "latent"):
                loaders["%s_%s" % (space, target)] = (
                    "model_%s_%s.json" % (space, target), model_from_json)
            loaders["latents_" + target] = (
                "latents_labeled_%s.csv" % target,
                lambda f, t=target: labeled_latent_set_from_csv(
                    f, self.artifact("generator").num_scales, t))
        for variant in VARIANTS:
            loaders[variant] = ("model_diagnostic_%s.json" % variant,
                                model_from_json)
        if key not in loaders:
            raise ValueError("Unknown artifact %s. Did you mean %s ?"
                             % (key, did_you_mean(key, list(loaders.keys()))))
        filename, loader = loaders[key]
        if not os.path.exists(self.path(filename)):
            raise StageError(
                "Artifact %s is missing from %s, run the stage producing it "
                "first." % (filename, self.directory),
                paths=[self.path(filename)],
            )
        return loader(self.path(filename))

    def clear(self):
        """Delete the artifacts of previous runs from the directory."""
        filenames = [f for files in STAGES.values() for f in files]
        for filename in filenames + list(OPTIONAL_ARTIFACTS) + [MANIFEST_FILENAME]:
            if os.path.exists(self.path(filename)):
                os.remove(self.path(filename))
        self._cache = {}
        self.manifest = RunManifest(self.config.to_dict())
        self.root = flametree.file_tree(self.directory)

    def stage_rng(self, stage):
        return self.rng.child(list(STAGES.keys()).index(stage))

    # STAGES

    def synth(self):
        """Generate the mixing model and the three real partitions."""
        rng = self.stage_rng("synth")
        mixing_cfg = self.config.mixing
        mixing = MixingModel.random(
            rng.child(0), dim=self.config.gan.x_dim,
            noise_scale=mixing_cfg.noise_scale, nonlinear=mixing_cfg.nonlinear,
            offset_scale=mixing_cfg.offset_scale,
        )
        partitions = gen_partitions(self.config.cell_counts(), mixing,
                                    rng.child(1), **self.config.factor_model())
        self._write("model_mixing.json", model_to_json(mixing))
        self._cache["mixing"] = mixing
        for name, (dataset, factors) in partitions.items():
            self._write("dataset_%s.csv" % name, dataset_to_csv(dataset))
            self._write("factors_%s.csv" % name, factors_to_csv(factors))
            self._cache[name] = dataset
        probe = separability_check(mixing, rng.child(2),
                                   **self.config.factor_model())
        self.manifest.data["probe"] = probe.to_dict()
        self.logger(message="Probe accuracies on balanced draws: disease %.3f, "
                    "subgroup %.3f" % (probe.disease_accuracy,
                                       probe.subgroup_accuracy))
        if not probe.passed:
            message = ("The factors are poorly separable from the features "
                       "(probe accuracies %s)" % probe.to_dict())
            self.logger(message=message)
            warnings.warn(message)

    def train_gen(self):
        """Train the style generator on the real training features."""
        result = train_generator(self.artifact("train"),
                                 cfg=self.config.gan_config(),
                                 rng=self.stage_rng("train-gen"),
                                 logger=self.logger)
        self._write("model_generator.json", model_to_json(result.generator))
        if result.discriminator is not None:
            self._write("model_discriminator.json",
                        model_to_json(result.discriminator))
        elif os.path.exists(self.path("model_discriminator.json")):
            os.remove(self.path("model_discriminator.json"))
        self._write("gan_log.csv", dataframe_to_csv(result.log))
        self._cache["generator"] = result.generator
        self.manifest.data["generator_mode"] = result.mode
        self.manifest.data["diverged_at"] = result.diverged_at
        self.manifest.data["fallback_reason"] = result.fallback_reason
        self.manifest.data["generator_quality"] = result.quality.to_dict()
        if not result.quality.passed:
            message = ("The %s generator fails the quality gate: %s"
                       % (result.mode, result.quality.to_dict()))
            self.logger(message=message)
            warnings.warn(message)

    def train_clf(self, space, targets=TARGETS):
        """Train the image-space or latent-space classifiers."""
        stage = "train-clf-%s" % space
        rng = self.stage_rng(stage)
        for i, target in enumerate(TARGETS):
            if target not in targets:
                continue
            if space == "image":
                model = train_image_classifier(
                    self.artifact("train"), target,
                    cfg=self.config.classifier_config("image_classifier"),
                    rng=rng.child(i), logger=self.logger)
            else:
                model = train_latent_classifier(
                    self.artifact("latents_" + target), target,
                    cfg=self.config.classifier_config("latent_classifier"),
                    rng=rng.child(i), style_mode=self.config.labeling.style_mode,
                    logger=self.logger)
            self._write("model_%s_%s.json" % (space, target), model_to_json(model))
            self._cache["%s_%s" % (space, target)] = model
            self.logger(message="%s classifier %s: validation accuracy %s"
                        % (space, target, model.validation_accuracy))

    def label(self):
        """Label the same synthetic stacks with both image classifiers."""
        rng = self.stage_rng("label")
        generator = self.artifact("generator")
        styles = sample_styles(
            self.config.labeling.n, generator, rng.child(0),
            shared_styles=self.config.labeling.style_mode == "shared")
        for target in TARGETS:
            latent_set = label_synthetics(
                len(styles), generator, self.artifact("image_" + target),
                rng.child(1), styles=styles, logger=self.logger)
            self._write("latents_labeled_%s.csv" % target,
                        dataframe_to_csv(latent_set.to_dataframe()))
            self._cache["latents_" + target] = latent_set
            self.logger(message="Labeled %d stacks for %s: %.3f positive"
                        % (len(latent_set), target,
                           latent_set.positive_fraction()))

    def traverse(self):
        """Plan the augmentation and traverse the starters it needs."""
        augmentation = self.config.augmentation
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            plan = plan_augmentation(
                self.artifact("train"), policy=augmentation.policy,
                explicit=augmentation.explicit,
                starter_factor=augmentation.starter_factor,
            )
        for warning in caught:
            self.logger(message=str(warning.message))
            warnings.warn(warning.message)
        self.logger(message="Augmentation plan: %s" % plan)
        trajectories = run_traversals(
            plan, self.artifact("generator"), self.artifact("latent_disease"),
            self.artifact("latent_subgroup"), self.config,
            self.stage_rng("traverse"), logger=self.logger,
        )
        self._write("trajectories.csv", trajectories_to_csv(trajectories))
        self._write("trajectory_summary.csv",
                    trajectory_summary_to_csv(trajectories))
        self._write("augmentation_plan.json", dict_to_json(plan.to_dict()))
        self._cache["plan"] = plan
        self._cache["trajectories"] = trajectories

    def augment(self):
        """Decode the converged trajectories into the augmented set."""
        train = self.artifact("train")
        plan = self.artifact("plan")
        start_id = max(self.artifact(p).next_free_id() for p in PARTITIONS)
        augmented = apply_traversals(
            train, plan, self.artifact("trajectories"), self.artifact("generator"),
            start_id=start_id, allow_partial=self.allow_partial,
            logger=self.logger,
        )
        self._write("dataset_augmented.csv", dataset_to_csv(augmented))
        self._write("provenance_synthetic.csv", provenance_to_csv(augmented))
        self._write("augmentation_result.json", dict_to_json(plan.to_dict()))
        self._cache["augmented"] = augmented
        self.manifest.data["augmentation"] = {
            cell_to_name(cell): count for cell, count in plan.achieved.items()}
        self.manifest.data["sources"] = dict(augmented.count_sources())
        self.logger(message="Augmented set: %(real)d real and %(synthetic)d "
                    "synthetic records" % augmented.count_sources())

    def train_diag(self, variants=VARIANTS):
        """Train the baseline (on the training set) and adapted (on the
        augmented set) diagnostic models with identical settings."""
        datasets = {"baseline": "train", "adapted": "augmented"}
        for variant in VARIANTS:
            if variant not in variants:
                continue
            model = train_diagnostic(
                self.artifact(datasets[variant]),
                cfg=self.config.classifier_config("diagnostic"),
                rng=self.stage_rng("train-diag"), logger=self.logger)
            self._write("model_diagnostic_%s.json" % variant,
                        model_to_json(model))
            self._cache[variant] = model

    def evaluate(self):
        """Score both diagnostic models on the test and leftover partitions
        and write the tables and the report."""
        if not same_configs(self.artifact("baseline"), self.artifact("adapted")):
            raise ValueError("The baseline and adapted models were trained "
                             "with different settings")
        predictions, report, _ = evaluate_and_report(
            self.artifact("baseline"), self.artifact("adapted"),
            self.artifact("test"), self.artifact("leftover"),
            metrics=self.config.metrics.to_dict(), seed=self.config.seed,
            data=self.report_data(), target=self.root,
        )
        self._cache["predictions"] = predictions
        self._cache["gap"] = report

    def report(self):
        """Recompute the tables and the report from predictions.csv."""
        _, report, _ = report_predictions(
            self.artifact("predictions"), metrics=self.config.metrics.to_dict(),
            seed=self.config.seed, data=self.report_data(), target=self.root)
        self._cache["gap"] = report

    def report_data(self):
        data = OrderedDict()
        data["seed"] = self.config.seed
        data["generator mode"] = self.manifest.data.get("generator_mode")
        if self.manifest.data.get("diverged_at") is not None:
            data["adversarial training diverged at step"] = (
                self.manifest.data["diverged_at"])
        if self.manifest.data.get("fallback_reason") is not None:
            data["fallback reason"] = self.manifest.data["fallback_reason"]
        if "generator_quality" in self.manifest.data:
            data["generator quality"] = dict(
                sorted(self.manifest.data["generator_quality"].items()))
        # Sorted so that reports rendered after a reload of the manifest
        # are identical.
        if "augmentation" in self.manifest.data:
            data["synthetic records"] = dict(
                sorted(self.manifest.data["augmentation"].items()))
        if "probe" in self.manifest.data:
            data["probe accuracies"] = dict(
                sorted(self.manifest.data["probe"].items()))
        return data

    # RUNNING

    def run_stage(self, stage, **parameters):
        """Run one stage, record it in the manifest and write the manifest.

        Failures are re-raised as a StageError naming the stage and its
        artifacts, after the manifest has recorded the failure.
        """
        if stage not in STAGES and stage != "report":
            raise ValueError("Unknown stage %s. Did you mean %s ?"
                             % (stage, did_you_mean(stage, list(STAGES))))
        method = {
            "synth": self.synth,
            "train-gen": self.train_gen,
            "train-clf-image": lambda **p: self.train_clf("image", **p),
            "label": self.label,
            "train-clf-latent": lambda **p: self.train_clf("latent", **p),
            "traverse": self.traverse,
            "augment": self.augment,
            "train-diag": self.train_diag,
            "evaluate": self.evaluate,
            "report": self.report,
        }[stage]
        self.logger(message="Stage %s..." % stage)
        start = time.time()
        try:
            method(**parameters)
        except Exception as error:
            self.manifest.record_stage(stage, "failed", time.time() - start,
                                       error=str(error))
            self.write_manifest()
            raise StageError(
                "Stage %s failed: %s" % (stage, error),
                stage=stage,
                paths=[self.path(f)
                       for f in STAGES.get(stage, REPORT_ARTIFACTS)],
            ) from error
        seconds = time.time() - start
        self.manifest.record_stage(stage, "done", seconds)
        self.write_manifest()
        self.logger(message="Stage %s done in %s" % (stage, human_duration(seconds)))

    def run(self, resume=False):
        """Run every stage in order and return the RunManifest.

        With ``resume``, the stages whose artifacts are all present are
        skipped, until the first stage which has to run; every stage after
        it runs again.
        """
        if not resume:
            self.clear()
        rerun = False
        for stage in self.logger.iter_bar(stage=list(STAGES)):
            if resume and not rerun and self.has_artifacts(stage):
                self.manifest.record_stage(stage, "resumed")
                self.logger(message="Stage %s resumed from its artifacts" % stage)
                continue
            rerun = True
            self.run_stage(stage)
        self.write_manifest()
        return self.manifest

    def write_manifest(self):
        self.manifest.record_artifacts(self.directory)
        self._write(MANIFEST_FILENAME, self.manifest.to_json())

    def verify(self):
        """Return the problems found by checking the manifest against the
        directory (empty list if every file matches)."""
        return self.manifest.verify(self.directory)

    def __repr__(self):
        return "ExperimentRun(%s, seed %s)" % (self.directory, self.config.seed)


def run_all(config, output_dir=None, resume=False, allow_partial=None,
            logger=None):
    """Run the complete experiment and return its RunManifest.

    Parameters
    ----------

    config
      An ExperimentConfig.

    output_dir
      Directory of the artifacts (default: ``config.output_dir``).

    resume
      Skip the leading stages whose artifacts are already present.

    allow_partial
      Go on when fewer synthetic records than planned could be produced
      (default: the config's ``augmentation.allow_partial``).

    logger
      None, 'bar' or a proglog logger.
    """
    run = ExperimentRun(config, output_dir=output_dir,
                        allow_partial=allow_partial, logger=logger)
    return run.run(resume=resume)
