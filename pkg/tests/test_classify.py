import numpy as np
import pytest

from latentfair.ndcore import Rng, ContractError
from latentfair.synthgen import MixingModel, gen_population
from latentfair.stylegen import GeneratorModel, sample_styles
from latentfair.classify import (
    ClassifierModel,
    ClassifierTrainConfig,
    LabeledLatentSet,
    SingleClassError,
    train_image_classifier,
    train_latent_classifier,
    label_synthetics,
    latent_inputs,
    calibration_violations,
    agreement,
)

mixing = MixingModel.random(Rng(1))
balanced = {("C", 0): 60, ("C", 1): 60, ("AA", 0): 60, ("AA", 1): 60}
train, _ = gen_population(balanced, mixing, Rng(2), name="train")
test, _ = gen_population(balanced, mixing, Rng(3), start_id=1000, name="test")
fast_cfg = ClassifierTrainConfig(epochs=100, learning_rate=1e-2)
generator = GeneratorModel(Rng(4))

disease_clf = train_image_classifier(train, "disease", fast_cfg, rng=Rng(5))


def make_latent_set(n=400, seed=6):
    styles = sample_styles(n, generator, Rng(seed))
    soft = 1 / (1 + np.exp(-3 * styles[:, 0, 0] / styles[:, 0, 0].std()))
    return LabeledLatentSet(styles, soft, "disease", sources=["test"])


def test_image_classifier_learns_the_disease():
    assert disease_clf.space == "image" and disease_clf.name == "image_disease"
    assert disease_clf.accuracy(test.features(), test.labels()) > 0.8
    assert disease_clf.validation_accuracy is not None
    assert disease_clf.training_config == fast_cfg.to_dict()


@pytest.mark.parametrize("target, threshold", [("disease", 0.9),
                                               ("subgroup", 0.95)])
def test_image_classifier_accuracy_on_balanced_populations(target, threshold):
    cells = {cell: 200 for cell in balanced}
    large_train, _ = gen_population(cells, mixing, Rng(8))
    large_test, _ = gen_population(cells, mixing, Rng(9), start_id=1000)
    model = train_image_classifier(large_train, target, fast_cfg, rng=Rng(10))
    assert model.validation_accuracy > threshold
    assert model.accuracy(large_test.features(),
                          large_test.targets(target)) > threshold


def test_training_is_deterministic():
    cfg = ClassifierTrainConfig(epochs=3)
    first = train_image_classifier(train, "subgroup", cfg, rng=Rng(7))
    second = train_image_classifier(train, "subgroup", cfg, rng=Rng(7))
    for name, array in first.parameters().items():
        assert np.array_equal(array, second.parameters()[name])


def test_single_class_error():
    healthy = train.restricted_to(lambda r: r.label == 0)
    with pytest.raises(SingleClassError) as error:
        train_image_classifier(healthy, "disease", rng=Rng(0))
    assert error.value.class_counts == {0: 120, 1: 0}


def test_hard_labels_threshold():
    styles = np.zeros((3, 2, 4))
    latent_set = LabeledLatentSet(styles, [0.2, 0.5, 0.7], "disease")
    assert list(latent_set.hard) == [0, 1, 1]
    assert latent_set.class_counts() == {0: 1, 1: 2}
    with pytest.raises(ValueError):
        LabeledLatentSet(styles, [0.2, 1.5, 0.7], "disease")
    with pytest.raises(ContractError):
        LabeledLatentSet(styles, [0.2, 0.5], "disease")


def test_labeled_set_dataframe():
    latent_set = make_latent_set(n=10)
    df = latent_set.to_dataframe()
    assert list(df.columns[:3]) == ["soft", "hard", "w0"]
    assert df.shape == (10, 2 + 2 * 32)
    back = LabeledLatentSet.from_dataframe(df, 2, "disease")
    assert np.array_equal(back.styles, latent_set.styles)


def test_label_synthetics():
    styles = sample_styles(20, generator, Rng(8))
    labeled = label_synthetics(20, generator, disease_clf, Rng(9), styles=styles)
    assert len(labeled) == 20 and labeled.target == "disease"
    assert np.array_equal(labeled.styles, styles)
    expected = disease_clf.predict_proba(generator.generate_many(styles))
    assert np.allclose(labeled.soft, expected)
    fresh = label_synthetics(7, generator, disease_clf, Rng(9))
    assert fresh.styles.shape == (7, 2, 32)


@pytest.mark.parametrize("style_mode, width", [("shared", 32), ("per-scale", 64)])
def test_latent_classifier(style_mode, width):
    latent_set = make_latent_set()
    clf = train_latent_classifier(latent_set, cfg=fast_cfg, rng=Rng(10),
                                  style_mode=style_mode)
    assert clf.input_width == width and clf.space == "latent"
    inputs = latent_inputs(latent_set.styles, clf)
    assert clf.accuracy(inputs, latent_set.hard) > 0.8


def test_latent_classifier_target_mismatch():
    with pytest.raises(ContractError):
        train_latent_classifier(make_latent_set(n=20), target="subgroup",
                                rng=Rng(0))


def test_labeling_needs_an_image_classifier():
    latent_clf = ClassifierModel("disease", "latent", 32, rng=Rng(0))
    with pytest.raises(ContractError):
        label_synthetics(5, generator, latent_clf, Rng(0))
    with pytest.raises(ContractError):
        agreement(disease_clf, latent_clf, generator, 5, Rng(0))
    assert 0 <= agreement(latent_clf, disease_clf, generator, 50, Rng(0)) <= 1


def test_input_width_is_checked():
    with pytest.raises(ContractError):
        disease_clf.predict_proba(np.zeros((2, 10)))
    with pytest.raises(ValueError):
        ClassifierModel("age", "image", 64)


def test_calibration_violations():
    probabilities = np.linspace(0, 1, 100)
    assert calibration_violations(probabilities, probabilities > 0.5) == 0
    assert calibration_violations(probabilities, probabilities < 0.5) == 1
