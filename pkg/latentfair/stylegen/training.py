"""Training of the style generator: adversarial (non-saturating loss with
R1 penalty) or by reconstruction of encoded real records."""

from collections import OrderedDict

import numpy as np
import pandas as pd
from box import Box

from ..ndcore import (
    Tensor,
    Tape,
    OptimState,
    NonFiniteError,
    MLP,
    add,
    sub,
    mul,
    matmul,
    scale,
    mean,
    l2_norm_squared,
    bce_with_logits,
)
from ..tools import resolve_logger
from .GeneratorModel import GeneratorModel, sample_styles
from .DiscriminatorModel import DiscriminatorModel

TRAINER_MODES = ("adversarial", "reconstruction")


class DivergenceError(ValueError):
    """Raised when a training loss or gradient becomes non-finite."""

    def __init__(self, message, step=None):
        ValueError.__init__(self, message)
        self.step = step


class GanTrainConfig:
    """Hyperparameters of the generator training.

    Parameters
    ----------

    steps
      Number of optimization steps (one discriminator and one generator
      update per step in adversarial mode).

    batch_size
      Number of real records (and fakes) per step.

    generator_learning_rate, discriminator_learning_rate
      Adam learning rates.

    r1_weight
      Weight of the R1 penalty on real batches.

    mode
      "adversarial" or "reconstruction".

    fallback
      If True, adversarial training that diverges or whose generator fails
      the quality gate is replaced by reconstruction training (see
      ``train_generator``).

    log_every, diagnostic_samples
      The log records the losses and the moment distance (computed on
      ``diagnostic_samples`` fakes) every ``log_every`` steps.

    quality_moment_ratio, quality_coordinates, quality_accuracy_band
      Thresholds of the quality gate (see ``generator_quality``): minimal
      drop of the moment distance, minimal number of coordinates (out of
      x_dim) whose fake mean is within 3 SE of the real one, and range of
      the discriminator accuracy.

    latent_noise, prior_weight
      Reconstruction mode: noise added to the encoded codes, and weight of
      the penalty pulling the codes' moments to those of N(0, I).

    z_dim, w_dim, num_scales, channels, x_dim, discriminator_hidden,
    w_bar_decay
      Model dimensions and mean-style tracking.
    """

    def __init__(self, steps=4000, batch_size=64, generator_learning_rate=1e-3,
                 discriminator_learning_rate=1e-3, r1_weight=1.0,
                 mode="adversarial", fallback=True, log_every=100,
                 diagnostic_samples=1024, latent_noise=0.1, prior_weight=1.0,
                 z_dim=16, w_dim=32, num_scales=2, channels=32, x_dim=64,
                 discriminator_hidden=32, w_bar_decay=0.995,
                 quality_moment_ratio=5.0, quality_coordinates=55,
                 quality_accuracy_band=(0.4, 0.8)):
        if mode not in TRAINER_MODES:
            raise ValueError("Trainer mode must be one of %s, not %s"
                             % (TRAINER_MODES, mode))
        if steps < 0 or batch_size <= 0 or log_every <= 0:
            raise ValueError("steps must be >= 0, batch_size and log_every > 0")
        for name, rate in [("generator", generator_learning_rate),
                           ("discriminator", discriminator_learning_rate)]:
            if not rate > 0:
                raise ValueError("The %s learning rate must be positive, got %s"
                                 % (name, rate))
        self.steps = steps
        self.batch_size = batch_size
        self.generator_learning_rate = generator_learning_rate
        self.discriminator_learning_rate = discriminator_learning_rate
        self.r1_weight = r1_weight
        self.mode = mode
        self.fallback = fallback
        self.log_every = log_every
        self.diagnostic_samples = diagnostic_samples
        self.latent_noise = latent_noise
        self.prior_weight = prior_weight
        self.z_dim = z_dim
        self.w_dim = w_dim
        self.num_scales = num_scales
        self.channels = channels
        self.x_dim = x_dim
        self.discriminator_hidden = discriminator_hidden
        self.w_bar_decay = w_bar_decay
        self.quality_moment_ratio = quality_moment_ratio
        self.quality_coordinates = quality_coordinates
        self.quality_accuracy_band = tuple(quality_accuracy_band)

    def to_dict(self):
        return OrderedDict(sorted(self.__dict__.items()))

    @staticmethod
    def from_dict(dct):
        return GanTrainConfig(**dct)

    def new_generator(self, rng):
        return GeneratorModel(
            rng, z_dim=self.z_dim, w_dim=self.w_dim, num_scales=self.num_scales,
            x_dim=self.x_dim, channels=self.channels,
            w_bar_decay=self.w_bar_decay,
        )

    def new_discriminator(self, rng):
        return DiscriminatorModel(rng, x_dim=self.x_dim,
                                  hidden=self.discriminator_hidden)

    def __repr__(self):
        return "GanTrainConfig(%s, %d steps)" % (self.mode, self.steps)


class TrainingResult:
    """Outcome of a generator training.

    ``log`` is a DataFrame with columns step, d_loss, g_loss,
    moment_distance. ``mode`` is the trainer mode which produced the
    generator, ``diverged_at`` the step at which adversarial training
    diverged (None if it did not). ``train_generator`` also fills
    ``quality`` (see ``generator_quality``) and ``fallback_reason`` (None
    when the configured mode was kept).
    """

    def __init__(self, generator, discriminator, log, mode, diverged_at=None,
                 quality=None, fallback_reason=None):
        self.generator = generator
        self.discriminator = discriminator
        self.log = log
        self.mode = mode
        self.diverged_at = diverged_at
        self.quality = quality
        self.fallback_reason = fallback_reason

    def __repr__(self):
        return "TrainingResult(%s, %d log rows)" % (self.mode, len(self.log))


def moment_distance(real, fake):
    """Return ``||mu_real - mu_fake||_2 + ||var_real - var_fake||_1``
    (per-coordinate means and variances of the rows)."""
    real, fake = np.atleast_2d(real), np.atleast_2d(fake)
    return float(
        np.linalg.norm(real.mean(axis=0) - fake.mean(axis=0))
        + np.abs(real.var(axis=0) - fake.var(axis=0)).sum()
    )


def discriminator_accuracy(discriminator, real, fake):
    """Fraction of real records with logit > 0 and fakes with logit < 0."""
    correct = np.concatenate([
        discriminator.logits(real) > 0,
        discriminator.logits(fake) < 0,
    ])
    return float(correct.mean())


def coordinates_within_standard_errors(real, fake, n_se=3):
    """Number of coordinates where the fake mean lies within ``n_se``
    standard errors (of the difference of the two means) of the real mean."""
    real, fake = np.atleast_2d(real), np.atleast_2d(fake)
    standard_error = np.sqrt(real.var(axis=0, ddof=1) / len(real)
                             + fake.var(axis=0, ddof=1) / len(fake))
    difference = np.abs(real.mean(axis=0) - fake.mean(axis=0))
    return int((difference <= n_se * standard_error).sum())


def generator_quality(result, real, cfg=None, rng=None):
    """Return the quality gate of a trained generator as a Box.

    Fields: ``moment_ratio`` (moment distance at initialization over the
    last logged one), ``coordinates_within_3se`` (see
    ``coordinates_within_standard_errors``, on ``cfg.diagnostic_samples``
    fresh fakes), ``discriminator_accuracy`` (None without discriminator)
    and ``passed``. The gate passes when the moment ratio reaches
    ``cfg.quality_moment_ratio``, at least ``cfg.quality_coordinates``
    coordinates are within 3 SE and, with a discriminator, its accuracy
    lies in ``cfg.quality_accuracy_band``.
    """
    cfg = GanTrainConfig() if cfg is None else cfg
    features = _features_of(real)
    distances = result.log["moment_distance"]
    last = float(distances.iloc[-1])
    moment_ratio = float(distances.iloc[0]) / last if last > 0 else np.inf
    fakes = _fake_batch(result.generator, cfg.diagnostic_samples, rng)
    within = coordinates_within_standard_errors(features, fakes)
    accuracy = None
    passed = (moment_ratio >= cfg.quality_moment_ratio) and (
        within >= cfg.quality_coordinates)
    if result.discriminator is not None:
        accuracy = discriminator_accuracy(result.discriminator, features, fakes)
        low, high = cfg.quality_accuracy_band
        passed = passed and (low <= accuracy <= high)
    return Box(moment_ratio=moment_ratio, coordinates_within_3se=within,
               discriminator_accuracy=accuracy, passed=bool(passed))


def _fake_batch(generator, n, rng, shared_styles=True):
    """Generate n fakes without touching the mean style."""
    training, generator.training = generator.training, False
    features = generator.generate_many(
        sample_styles(n, generator, rng, shared_styles=shared_styles))
    generator.training = training
    return features


def _diagnostic_row(step, real, generator, cfg, rng, d_loss, g_loss):
    fakes = _fake_batch(generator, cfg.diagnostic_samples, rng)
    return OrderedDict([
        ("step", step), ("d_loss", d_loss), ("g_loss", g_loss),
        ("moment_distance", moment_distance(real, fakes)),
    ])


def _styles_on_tape(generator, z, tape):
    w = generator.map_tensor(Tensor(z), tape=tape)
    return w, [w] * generator.num_scales


def _discriminator_step(generator, discriminator, real_batch, rng, opt, cfg):
    fakes = _fake_batch(generator, len(real_batch), rng)
    tape = Tape()
    tensors = discriminator.tensors(tape)
    real_logits = discriminator.forward(Tensor(real_batch), tensors)
    fake_logits = discriminator.forward(Tensor(fakes), tensors)
    loss = add(
        add(mean(bce_with_logits(real_logits, 1.0)),
            mean(bce_with_logits(fake_logits, 0.0))),
        discriminator.r1_penalty(real_batch, tensors, weight=cfg.r1_weight),
    )
    opt.step(discriminator.parameters(), tape.backward(loss))
    return loss.item()


def _generator_step(generator, discriminator, n, rng, opt):
    tape = Tape()
    w, ws = _styles_on_tape(generator, rng.normal((n, generator.z_dim)), tape)
    logits = discriminator.forward(generator.synthesize(ws, tape=tape))
    loss = mean(bce_with_logits(logits, 1.0))
    opt.step(generator.parameters(), tape.backward(loss))
    generator.update_mean_style(w.data)
    return loss.item()


def train_gan(real, cfg=None, rng=None, logger=None):
    """Train a generator and a discriminator adversarially on a dataset.

    Each step updates the discriminator (non-saturating loss plus R1
    penalty on the real batch) then the generator (non-saturating loss).

    Parameters
    ----------

    real
      A synthgen Dataset (or an (n, 64) array of features).

    cfg
      A GanTrainConfig (defaults if None).

    rng
      ndcore Rng. Initialization, batches and diagnostics use distinct
      children of this stream.

    logger
      Either None for no logger, 'bar' for a progress bar logger, or any
      proglog progress bar logger.

    Returns
    -------

    A TrainingResult in "adversarial" mode.

    Raises
    ------

    DivergenceError, carrying the step index, if a loss or gradient
    becomes non-finite.
    """
    cfg = GanTrainConfig() if cfg is None else cfg
    features = _features_of(real)
    init_rng, batch_rng, diagnostic_rng = rng.child(0), rng.child(1), rng.child(2)
    generator = cfg.new_generator(init_rng)
    discriminator = cfg.new_discriminator(init_rng)
    g_opt = OptimState("adam", learning_rate=cfg.generator_learning_rate)
    d_opt = OptimState("adam", learning_rate=cfg.discriminator_learning_rate)
    logger = resolve_logger(logger, bars=["step"])
    rows = [_diagnostic_row(0, features, generator, cfg, diagnostic_rng,
                            np.nan, np.nan)]
    generator.training = True
    for step in logger.iter_bar(step=range(1, cfg.steps + 1)):
        batch = features[batch_rng.integers(0, len(features), cfg.batch_size)]
        try:
            d_loss = _discriminator_step(
                generator, discriminator, batch, batch_rng, d_opt, cfg)
            g_loss = _generator_step(
                generator, discriminator, cfg.batch_size, batch_rng, g_opt)
        except NonFiniteError as error:
            generator.training = False
            raise DivergenceError(
                "Adversarial training diverged at step %d (%s)" % (step, error),
                step=step,
            )
        if not (np.isfinite(d_loss) and np.isfinite(g_loss)):
            generator.training = False
            raise DivergenceError(
                "Non-finite losses at step %d: d=%s, g=%s" % (step, d_loss, g_loss),
                step=step,
            )
        if step % cfg.log_every == 0 or step == cfg.steps:
            rows.append(_diagnostic_row(step, features, generator, cfg,
                                        diagnostic_rng, d_loss, g_loss))
    generator.training = False
    return TrainingResult(generator, discriminator, pd.DataFrame(rows),
                          mode="adversarial")


def train_reconstruction(real, cfg=None, rng=None, logger=None):
    """Train the generator as the decoder of an autoencoder on real records.

    An encoder MLP 64 -> 32 -> z_dim encodes each real record, Gaussian
    noise (``cfg.latent_noise``) is added to the code, which is mapped and
    decoded by the generator. The loss is the mean squared reconstruction
    error plus ``cfg.prior_weight`` times the squared distance of the codes'
    first two moments to those of N(0, I), so that decoding z ~ N(0, I)
    produces realistic samples.
    """
    cfg = GanTrainConfig(mode="reconstruction") if cfg is None else cfg
    features = _features_of(real)
    init_rng, batch_rng, diagnostic_rng = rng.child(0), rng.child(1), rng.child(2)
    generator = cfg.new_generator(init_rng)
    encoder = MLP([cfg.x_dim, 32, cfg.z_dim], rng=init_rng, name="encoder")
    params = OrderedDict(generator.parameters())
    params.update(encoder.parameters())
    opt = OptimState("adam", learning_rate=cfg.generator_learning_rate)
    logger = resolve_logger(logger, bars=["step"])
    rows = [_diagnostic_row(0, features, generator, cfg, diagnostic_rng,
                            np.nan, np.nan)]
    n = min(cfg.batch_size, len(features))
    column_mean = Tensor(np.full((1, n), 1.0 / n))
    unit = Tensor(np.ones((1, cfg.z_dim)))
    for step in logger.iter_bar(step=range(1, cfg.steps + 1)):
        batch = features[batch_rng.integers(0, len(features), n)]
        tape = Tape()
        z = encoder(Tensor(batch), tape=tape)
        noise = Tensor(cfg.latent_noise * batch_rng.normal((n, cfg.z_dim)))
        w = generator.map_tensor(add(z, noise), tape=tape)
        x_hat = generator.synthesize([w] * generator.num_scales, tape=tape)
        reconstruction = scale(l2_norm_squared(sub(x_hat, Tensor(batch))),
                               1.0 / batch.size)
        prior = add(
            l2_norm_squared(matmul(column_mean, z)),
            l2_norm_squared(sub(matmul(column_mean, mul(z, z)), unit)),
        )
        loss = add(reconstruction, scale(prior, cfg.prior_weight))
        try:
            opt.step(params, tape.backward(loss))
        except NonFiniteError as error:
            raise DivergenceError(
                "Reconstruction training diverged at step %d (%s)" % (step, error),
                step=step,
            )
        generator.update_mean_style(w.data)
        if step % cfg.log_every == 0 or step == cfg.steps:
            rows.append(_diagnostic_row(step, features, generator, cfg,
                                        diagnostic_rng, np.nan, loss.item()))
    return TrainingResult(generator, None, pd.DataFrame(rows),
                          mode="reconstruction")


def train_generator(real, cfg=None, rng=None, logger=None):
    """Train a generator in the configured mode.

    If adversarial training trips the divergence detector, or produces a
    generator failing the quality gate (``generator_quality``), and
    ``cfg.fallback`` is set, a generator is trained by reconstruction
    instead. The result's ``mode``, ``diverged_at``, ``quality`` and
    ``fallback_reason`` tell what happened.
    """
    cfg = GanTrainConfig() if cfg is None else cfg
    log = resolve_logger(logger)
    if cfg.mode == "reconstruction":
        result = train_reconstruction(real, cfg=cfg, rng=rng, logger=logger)
    else:
        try:
            result = train_gan(real, cfg=cfg, rng=rng, logger=logger)
        except DivergenceError as error:
            if not cfg.fallback:
                raise
            log(message="%s, falling back to reconstruction training." % error)
            result = train_reconstruction(real, cfg=cfg, rng=rng.child(3),
                                          logger=logger)
            result.diverged_at = error.step
            result.fallback_reason = "diverged at step %d" % error.step
    result.quality = generator_quality(result, real, cfg, rng.child(4))
    if result.mode == "adversarial" and cfg.fallback and not result.quality.passed:
        reason = ("quality gate failed (moment ratio %.2f, %d coordinates "
                  "within 3 SE, discriminator accuracy %.3f)" % (
                      result.quality.moment_ratio,
                      result.quality.coordinates_within_3se,
                      result.quality.discriminator_accuracy))
        log(message="Adversarial %s, falling back to reconstruction training."
            % reason)
        result = train_reconstruction(real, cfg=cfg, rng=rng.child(3),
                                      logger=logger)
        result.fallback_reason = reason
        result.quality = generator_quality(result, real, cfg, rng.child(4))
    if not result.quality.passed:
        log(message="The %s generator fails the quality gate: %s"
            % (result.mode, dict(result.quality)))
    return result


def _features_of(real):
    features = real.features() if hasattr(real, "features") else np.asarray(real)
    if len(features) == 0:
        raise ValueError("Cannot train a generator on an empty dataset")
    return np.atleast_2d(np.asarray(features, dtype=float))
