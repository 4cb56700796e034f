import numpy as np
import pandas as pd
import pytest

from latentfair.ndcore import Rng, Tape, ContractError
from latentfair.synthgen import MixingModel, gen_population
from latentfair.stylegen import (
    GeneratorModel,
    DiscriminatorModel,
    StyleStack,
    StateError,
    GanTrainConfig,
    train_gan,
    train_reconstruction,
    train_generator,
    moment_distance,
    discriminator_accuracy,
    coordinates_within_standard_errors,
    generator_quality,
    TrainingResult,
    sample_styles,
    sample_fakes,
    truncate,
)

generator = GeneratorModel(Rng(0))
mixing = MixingModel.random(Rng(1))
real, _ = gen_population({("C", 0): 40, ("C", 1): 40, ("AA", 0): 40}, mixing, Rng(2))

small_cfg = GanTrainConfig(steps=20, batch_size=16, log_every=10,
                           diagnostic_samples=64)


def test_generate_is_deterministic():
    styles = StyleStack.broadcast(Rng(3).normal(32), 2)
    assert np.array_equal(generator.generate(styles), generator.generate(styles))
    assert generator.generate(styles).shape == (64,)


def test_generate_many_matches_generate():
    styles = sample_styles(5, generator, Rng(4), shared_styles=False)
    many = generator.generate_many(styles)
    for stack, x in zip(styles, many):
        assert np.allclose(generator.generate(StyleStack(list(stack))), x,
                           atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_modulation_identity(seed):
    rng = Rng(seed)
    styles_a = rng.normal((3, 2, 32))
    styles_b = rng.normal((3, 2, 32))
    out_a = generator.generate_many(styles_a, identity_scales=(0, 1))
    out_b = generator.generate_many(styles_b, identity_scales=(0, 1))
    assert np.array_equal(out_a, out_b)
    assert not np.allclose(generator.generate_many(styles_a),
                           generator.generate_many(styles_b))


def test_one_identity_scale_keeps_the_other_scale_active():
    rng = Rng(9)
    stack = rng.normal((1, 2, 32))
    changed = stack.copy()
    changed[0, 0] = rng.normal(32)
    assert np.array_equal(generator.generate_many(stack, identity_scales=(0,)),
                          generator.generate_many(changed, identity_scales=(0,)))
    changed[0, 1] = rng.normal(32)
    assert not np.allclose(generator.generate_many(stack, identity_scales=(0,)),
                           generator.generate_many(changed, identity_scales=(0,)))


@pytest.mark.parametrize("a, b", [(0.3, 0.5), (1.0, 0.7), (0.0, 0.4), (0.9, 0.9)])
def test_truncation_composition(a, b):
    model = GeneratorModel(Rng(5))
    model.update_mean_style(Rng(6).normal((10, 32)))
    w = Rng(7).normal(32)
    twice = truncate(truncate(w, a, model), b, model)
    assert np.allclose(twice, truncate(w, a * b, model), atol=1e-12)
    assert np.allclose(truncate(w, 1, model), w)
    assert np.allclose(truncate(w, 0, model), model.w_bar)


def test_truncation_errors():
    model = GeneratorModel(Rng(5))
    with pytest.raises(StateError):
        model.truncate(np.zeros(32), 0.5)
    model.update_mean_style(np.zeros((1, 32)))
    with pytest.raises(ValueError):
        model.truncate(np.zeros(32), 1.5)


def test_exact_mean_style():
    model = GeneratorModel(Rng(0), w_bar_decay=None)
    ws = Rng(1).normal((100, 32))
    for batch in np.split(ws, 4):
        model.update_mean_style(batch)
    assert np.allclose(model.w_bar, ws.mean(axis=0), atol=1e-12)
    assert model.w_bar_count == 100


def test_map_updates_mean_style_in_training_mode_only():
    model = GeneratorModel(Rng(0))
    model.map(Rng(1).normal((4, 16)))
    assert model.w_bar is None
    model.training = True
    model.map(Rng(1).normal((4, 16)))
    assert model.w_bar_count == 4


def test_style_stack_vectors():
    stack = StyleStack([np.ones(3), np.zeros(3)])
    assert not stack.is_shared
    assert StyleStack.from_vector(stack.vector("per-scale"), 2, "per-scale") == stack
    with pytest.raises(ContractError):
        stack.vector("shared")
    shared = StyleStack.broadcast(np.arange(3.0), 2)
    assert np.array_equal(shared.vector(), np.arange(3.0))
    with pytest.raises(ContractError):
        StyleStack([np.ones(3), np.ones(4)])


def test_wrong_number_of_scales():
    with pytest.raises(ContractError):
        generator.generate(StyleStack.broadcast(np.zeros(32), 3))


def test_sampling_shapes():
    assert sample_styles(0, generator, Rng(0)).shape == (0, 2, 32)
    assert generator.generate_many(np.zeros((0, 2, 32))).shape == (0, 64)
    shared = sample_styles(4, generator, Rng(0))
    assert np.array_equal(shared[:, 0], shared[:, 1])
    fakes = sample_fakes(3, generator, Rng(0))
    assert len(fakes) == 3 and fakes[0][1].shape == (64,)


def test_r1_penalty_against_finite_differences():
    discriminator = DiscriminatorModel(Rng(2))
    x = Rng(3).normal((4, 64))
    penalty = discriminator.r1_penalty(x, discriminator.tensors(), weight=2.0).item()
    h = 1e-6
    total = 0
    for row in x:
        gradient = np.zeros(64)
        for j in range(64):
            up, down = row.copy(), row.copy()
            up[j] += h
            down[j] -= h
            gradient[j] = (discriminator.logits(up)[0]
                           - discriminator.logits(down)[0]) / (2 * h)
        total += gradient @ gradient
    assert penalty == pytest.approx(2.0 / (2 * 4) * total, rel=1e-5)


def test_r1_penalty_has_parameter_gradients():
    discriminator = DiscriminatorModel(Rng(2))
    tape = Tape()
    tensors = discriminator.tensors(tape)
    grads = tape.backward(discriminator.r1_penalty(Rng(3).normal((4, 64)), tensors))
    assert np.abs(grads["discriminator.0.W"]).sum() > 0
    assert np.abs(grads["discriminator.0.b"]).sum() == 0


def test_moment_distance():
    x = Rng(0).normal((50, 4))
    assert moment_distance(x, x) == 0
    assert moment_distance(x, x + 1) == pytest.approx(2.0)


def test_zero_steps_returns_initialization():
    result = train_gan(real, GanTrainConfig(steps=0, diagnostic_samples=64),
                       rng=Rng(11))
    fresh = GanTrainConfig().new_generator(Rng(11).child(0))
    for name, array in fresh.parameters().items():
        assert np.array_equal(result.generator.parameters()[name], array)
    assert list(result.log["step"]) == [0]


def test_train_gan_short_run():
    result = train_gan(real, small_cfg, rng=Rng(12))
    assert result.mode == "adversarial"
    assert list(result.log["step"]) == [0, 10, 20]
    assert np.all(np.isfinite(result.log["moment_distance"]))
    assert result.generator.w_bar_count == 20 * 16
    assert 0 <= discriminator_accuracy(result.discriminator, real.features(),
                                       result.generator.generate_many(
                                           sample_styles(10, result.generator,
                                                         Rng(0)))) <= 1


def test_train_gan_is_deterministic():
    first = train_gan(real, small_cfg, rng=Rng(12)).generator.parameters()
    second = train_gan(real, small_cfg, rng=Rng(12)).generator.parameters()
    for name in first:
        assert np.array_equal(first[name], second[name])


def test_train_reconstruction():
    cfg = GanTrainConfig(steps=30, batch_size=16, log_every=10,
                         diagnostic_samples=64, mode="reconstruction")
    result = train_generator(real, cfg, rng=Rng(13))
    assert result.mode == "reconstruction"
    assert result.discriminator is None
    assert result.diverged_at is None
    assert list(result.log["step"]) == [0, 10, 20, 30]
    direct = train_reconstruction(real, cfg, rng=Rng(13))
    assert np.array_equal(direct.generator.const, result.generator.const)


def test_training_errors():
    with pytest.raises(ValueError):
        train_gan(real.features()[:0], small_cfg, rng=Rng(0))
    with pytest.raises(ValueError):
        GanTrainConfig(mode="diffusion")
    with pytest.raises(ValueError):
        GanTrainConfig(generator_learning_rate=0)


def test_config_round_trip():
    assert GanTrainConfig.from_dict(small_cfg.to_dict()).to_dict() == small_cfg.to_dict()


def test_coordinates_within_standard_errors():
    rng = Rng(20)
    x = rng.normal((500, 64))
    assert coordinates_within_standard_errors(x, x) == 64
    assert coordinates_within_standard_errors(x, rng.normal((500, 64))) >= 55
    collapsed = np.ones((500, 64))
    assert coordinates_within_standard_errors(x, collapsed) == 0


def quality_of(distances, cfg):
    log = pd.DataFrame({"step": range(len(distances)),
                        "moment_distance": distances})
    result = TrainingResult(generator, None, log, mode="reconstruction")
    own_fakes = generator.generate_many(sample_styles(2000, generator, Rng(21)))
    return generator_quality(result, own_fakes, cfg, Rng(22))


def test_generator_quality():
    cfg = GanTrainConfig(diagnostic_samples=2000)
    quality = quality_of([10.0, 4.0, 1.0], cfg)
    assert quality.moment_ratio == pytest.approx(10.0)
    assert quality.coordinates_within_3se >= 55
    assert quality.discriminator_accuracy is None
    assert quality.passed
    assert not quality_of([2.0, 1.0], cfg).passed
    assert not quality_of([10.0, 1.0], GanTrainConfig(
        diagnostic_samples=2000, quality_coordinates=65)).passed


def test_quality_gate_falls_back_to_reconstruction():
    cfg = GanTrainConfig(steps=20, batch_size=16, log_every=10,
                         diagnostic_samples=64, quality_moment_ratio=1e9)
    result = train_generator(real, cfg, rng=Rng(14))
    assert result.mode == "reconstruction"
    assert result.diverged_at is None
    assert result.fallback_reason.startswith("quality gate failed")
    assert not result.quality.passed
    direct = train_reconstruction(real, cfg, rng=Rng(14).child(3))
    assert np.array_equal(direct.generator.const, result.generator.const)


def test_quality_gate_without_fallback_keeps_the_adversarial_generator():
    cfg = GanTrainConfig(steps=20, batch_size=16, log_every=10,
                         diagnostic_samples=64, quality_moment_ratio=1e9,
                         fallback=False)
    result = train_generator(real, cfg, rng=Rng(14))
    assert result.mode == "adversarial"
    assert result.fallback_reason is None
    assert not result.quality.passed
    assert 0 <= result.quality.discriminator_accuracy <= 1
