"""Training of the image-space and latent-space classifiers, and labeling
of synthetic samples."""

from collections import OrderedDict

import numpy as np

from ..ndcore import Tensor, Tape, OptimState, ContractError, mean, bce_with_logits
from ..stylegen import sample_styles
from ..tools import resolve_logger
from .ClassifierModel import ClassifierModel
from .LabeledLatentSet import LabeledLatentSet


class SingleClassError(ValueError):
    """Raised when training data contains only one class of the target."""

    def __init__(self, message, class_counts=None):
        ValueError.__init__(self, message)
        self.class_counts = class_counts


class ClassifierTrainConfig:
    """Hyperparameters of classifier training (BCE loss, Adam).

    Parameters
    ----------

    epochs, batch_size, learning_rate
      Defaults 30 epochs of minibatches of 64, Adam rate 1e-3.

    validation_fraction
      Fraction of the data held out to measure the validation accuracy.

    hidden
      Hidden layer widths.

    soft_labels
      Latent classifiers only: train on the soft labels of the labeling
      classifier instead of the hard (thresholded) ones.
    """

    def __init__(self, epochs=30, batch_size=64, learning_rate=1e-3,
                 validation_fraction=0.1, hidden=(32, 32), soft_labels=False):
        if epochs < 0 or batch_size <= 0 or not learning_rate > 0:
            raise ValueError("epochs must be >= 0, batch_size and learning_rate > 0")
        if not 0 <= validation_fraction < 1:
            raise ValueError("validation_fraction must be in [0, 1)")
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.validation_fraction = validation_fraction
        self.hidden = tuple(hidden)
        self.soft_labels = soft_labels

    def to_dict(self):
        dct = OrderedDict(sorted(self.__dict__.items()))
        dct["hidden"] = list(self.hidden)
        return dct

    @staticmethod
    def from_dict(dct):
        return ClassifierTrainConfig(**dct)


def _check_two_classes(hard_targets, what):
    counts = {0: int(np.sum(hard_targets == 0)), 1: int(np.sum(hard_targets == 1))}
    if min(counts.values()) == 0:
        raise SingleClassError(
            "Cannot train a classifier on %s with a single class (counts: %s)"
            % (what, counts),
            class_counts=counts,
        )
    return counts


def fit_classifier(model, inputs, targets, cfg, rng, soft=False, logger=None):
    """Train ``model`` in place on rows of ``inputs`` and return it.

    The data is split 90/10 (``cfg.validation_fraction``) with a random
    permutation; the accuracy on the held-out part (hard targets) is stored
    in ``model.validation_accuracy``.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    order = rng.child(0).permutation(len(inputs))
    n_validation = int(round(cfg.validation_fraction * len(inputs)))
    validation, train = order[:n_validation], order[n_validation:]
    opt = OptimState("adam", learning_rate=cfg.learning_rate)
    batch_rng = rng.child(1)
    params = model.parameters()
    logger = resolve_logger(logger, bars=["epoch"])
    for _epoch in logger.iter_bar(epoch=range(cfg.epochs)):
        shuffled = train[batch_rng.permutation(len(train))]
        for start in range(0, len(shuffled), cfg.batch_size):
            batch = shuffled[start:start + cfg.batch_size]
            tape = Tape()
            logits = model.forward(Tensor(inputs[batch]), tape=tape)
            loss = mean(bce_with_logits(logits, targets[batch][:, None], soft=soft))
            opt.step(params, tape.backward(loss))
    model.training_config = cfg.to_dict()
    if len(validation):
        model.validation_accuracy = model.accuracy(
            inputs[validation], (targets[validation] >= 0.5).astype(int))
    return model


def train_image_classifier(data, target, cfg=None, rng=None, logger=None):
    """Train a disease or subgroup classifier on the features of a Dataset.

    Parameters
    ----------

    data
      synthgen Dataset of FeatureRecords.

    target
      "disease" or "subgroup" (subgroup 1 = AfricanAmerican).

    cfg
      A ClassifierTrainConfig (defaults if None).

    rng
      ndcore Rng (the initialization, the split and the batches use
      distinct children).

    Returns
    -------

    A ClassifierModel in image space with its ``validation_accuracy``.
    """
    cfg = ClassifierTrainConfig() if cfg is None else cfg
    targets = data.targets(target)
    _check_two_classes(targets, "dataset %s" % data.name)
    features = data.features()
    model = ClassifierModel(target, "image", features.shape[1], rng=rng.child(2),
                            hidden=cfg.hidden)
    return fit_classifier(model, features, targets, cfg, rng, logger=logger)


def label_synthetics(n, generator, image_clf, rng, styles=None,
                     shared_styles=True, logger=None, batch_size=512):
    """Sample n style stacks, decode them and label them with an image
    classifier.

    Parameters
    ----------

    n
      Number of samples.

    generator
      Trained GeneratorModel.

    image_clf
      Image-space ClassifierModel providing the labels.

    rng
      ndcore Rng for the latent codes.

    styles
      Optional (n, L, w_dim) stacks to label instead of sampling new ones
      (to label the same samples for several targets).

    Returns
    -------

    A LabeledLatentSet (soft labels from the classifier, never ground
    truth).
    """
    if image_clf.space != "image":
        raise ContractError(
            "Synthetic samples must be labeled by an image-space classifier, "
            "got %s" % image_clf.name
        )
    if styles is None:
        styles = sample_styles(n, generator, rng, shared_styles=shared_styles)
    logger = resolve_logger(logger, bars=["batch"])
    soft = np.zeros(len(styles))
    for start in logger.iter_bar(batch=range(0, len(styles), batch_size)):
        chunk = styles[start:start + batch_size]
        soft[start:start + batch_size] = image_clf.predict_proba(
            generator.generate_many(chunk))
    return LabeledLatentSet(styles, soft, image_clf.target,
                            sources=["generator", image_clf.name])


def train_latent_classifier(latent_set, target=None, cfg=None, rng=None,
                            style_mode="shared", logger=None):
    """Train a latent-space classifier on a LabeledLatentSet.

    Inputs are the single w of each stack (``style_mode="shared"``) or the
    concatenation of its w_i ("per-scale"). Hard labels are used unless
    ``cfg.soft_labels`` is set. The returned model is differentiable with
    respect to its input.
    """
    cfg = ClassifierTrainConfig() if cfg is None else cfg
    target = latent_set.target if target is None else target
    if target != latent_set.target:
        raise ContractError("The set was labeled for %s, not %s"
                            % (latent_set.target, target))
    _check_two_classes(latent_set.hard, "the %s latent set" % target)
    inputs = latent_set.inputs(style_mode)
    targets = latent_set.soft if cfg.soft_labels else latent_set.hard
    model = ClassifierModel(target, "latent", inputs.shape[1], rng=rng.child(2),
                            hidden=cfg.hidden, style_mode=style_mode)
    return fit_classifier(model, inputs, targets, cfg, rng,
                          soft=cfg.soft_labels, logger=logger)


def latent_inputs(styles, latent_clf):
    """Return the inputs of a latent classifier for (n, L, w) stacks."""
    styles = np.asarray(styles, dtype=float)
    if latent_clf.style_mode == "shared":
        return styles[:, 0, :]
    return styles.reshape(len(styles), -1)


def calibration_violations(probabilities, outcomes, n_buckets=10):
    """Sort samples by predicted probability, split them in ``n_buckets``
    buckets and return the number of buckets whose empirical positive rate
    is below the previous bucket's."""
    order = np.argsort(np.asarray(probabilities), kind="stable")
    outcomes = np.asarray(outcomes)[order]
    rates = [bucket.mean() for bucket in np.array_split(outcomes, n_buckets)
             if len(bucket)]
    return int(np.sum(np.diff(rates) < 0))


def agreement(latent_clf, image_clf, generator, n, rng, shared_styles=True):
    """Fraction of n fresh fakes on which the latent classifier (on the
    stacks) and the image classifier (on the decoded features) agree."""
    if latent_clf.space != "latent" or image_clf.space != "image":
        raise ContractError("agreement() needs a latent and an image classifier")
    styles = sample_styles(n, generator, rng, shared_styles=shared_styles)
    latent_predictions = latent_clf.predict(latent_inputs(styles, latent_clf))
    image_predictions = image_clf.predict(generator.generate_many(styles))
    return float(np.mean(latent_predictions == image_predictions))
