import numpy as np
import pytest

from latentfair.ndcore import Rng, ContractError
from latentfair.stylegen import GeneratorModel, StyleStack
from latentfair.classify import ClassifierModel
from latentfair.traverse import (
    TraversalConfig,
    StarterCriteria,
    StarterBudgetError,
    TrajectoryRejectedError,
    traverse,
    decode_endpoint,
    traversal_objective,
    backtracking_step_size,
    generator_jacobian,
    generator_metric_direction,
    select_starters,
    trajectories_dataframe,
)

W_DIM = 32


def unit(i, size=W_DIM):
    vector = np.zeros(size)
    vector[i] = 1.0
    return vector


def linear_classifier(target, direction, bias=0.0, style_mode="shared"):
    """Latent classifier with logit = direction . w + bias."""
    clf = ClassifierModel(target, "latent", len(direction), hidden=(),
                          style_mode=style_mode)
    params = clf.parameters()
    params["classifier.0.W"][:, 0] = direction
    params["classifier.0.b"][0] = bias
    return clf


disease_clf = linear_classifier("disease", 2 * unit(0))
subgroup_clf = linear_classifier("subgroup", 2 * unit(1), bias=3.0)
generator = GeneratorModel(Rng(0))


def stack(w):
    return StyleStack.broadcast(w, 2)


def finite_difference_gradient(function, w, h=1e-6):
    gradient = np.zeros_like(w)
    for i in range(len(w)):
        up, down = w.copy(), w.copy()
        up[i] += h
        down[i] -= h
        gradient[i] = (function(up) - function(down)) / (2 * h)
    return gradient


@pytest.mark.parametrize("seed", range(50))
def test_objective_gradient_against_finite_differences(seed):
    rng = Rng(seed)
    disease = ClassifierModel("disease", "latent", W_DIM, rng=rng.child(0),
                              hidden=(8,))
    subgroup = ClassifierModel("subgroup", "latent", 2 * W_DIM, rng=rng.child(1),
                               hidden=(8,), style_mode="per-scale")
    cfg = TraversalConfig(anchor_weight=0.3, subgroup_weight=0.5)
    w0, w = rng.normal(W_DIM), rng.normal(W_DIM)

    def value(v):
        return traversal_objective(v, w0, 1, cfg, disease, subgroup)[0]

    _, gradient = traversal_objective(w, w0, 1, cfg, disease, subgroup)
    numerical = finite_difference_gradient(value, w)
    assert np.allclose(gradient, numerical, rtol=1e-4, atol=1e-7)


def test_per_scale_objective_gradient():
    rng = Rng(20)
    disease = ClassifierModel("disease", "latent", 2 * W_DIM, rng=rng.child(0),
                              hidden=(8,), style_mode="per-scale")
    subgroup = ClassifierModel("subgroup", "latent", 2 * W_DIM, rng=rng.child(1),
                               hidden=(8,), style_mode="per-scale")
    cfg = TraversalConfig(mode="per-scale")
    w0 = rng.normal(2 * W_DIM)
    w = w0 + 0.1 * rng.normal(2 * W_DIM)

    def value(v):
        return traversal_objective(v, w0, 0, cfg, disease, subgroup)[0]

    _, gradient = traversal_objective(w, w0, 0, cfg, disease, subgroup)
    assert np.allclose(gradient, finite_difference_gradient(value, w),
                       rtol=1e-4, atol=1e-7)


def test_traversal_converges():
    trajectory = traverse(stack(np.zeros(W_DIM)), TraversalConfig(), disease_clf,
                          subgroup_clf, subgroup="AA", starter_id=7)
    assert trajectory.converged
    assert trajectory.starter_id == 7
    assert trajectory.final.p_disease >= 0.9
    assert trajectory.final.p_disease > trajectory.initial.p_disease
    assert trajectory.initial.iteration == 0
    assert [s.iteration for s in trajectory.states] == list(
        range(trajectory.iterations + 1))
    # Only the classifier directions move.
    drift = trajectory.final.styles.vector() - np.zeros(W_DIM)
    assert np.allclose(drift[2:], 0)


def test_already_converged_starter():
    trajectory = traverse(stack(2 * unit(0)), TraversalConfig(), disease_clf,
                          subgroup_clf, subgroup="AA")
    assert trajectory.converged
    assert trajectory.iterations == 0
    assert len(trajectory.states) == 1


def test_zero_step_size_freezes_the_trajectory():
    cfg = TraversalConfig(step_size=0, max_iterations=5)
    trajectory = traverse(stack(np.zeros(W_DIM)), cfg, disease_clf, subgroup_clf,
                          subgroup="AA")
    assert trajectory.outcome == "max-iters"
    assert len(trajectory.states) == 6
    assert all(state.styles == trajectory.initial.styles
               for state in trajectory.states)


def test_strong_anchor_keeps_the_starter():
    cfg = TraversalConfig(anchor_weight=1e6, max_iterations=50)
    w0 = Rng(3).normal(W_DIM)
    w0[0] = -2.0
    trajectory = traverse(stack(w0), cfg, disease_clf, subgroup_clf, subgroup="AA")
    assert trajectory.outcome == "max-iters"
    assert np.abs(trajectory.final.styles.vector() - w0).max() < 1e-5


def test_traversal_towards_healthy():
    cfg = TraversalConfig(target_label=0)
    trajectory = traverse(stack(2 * unit(0)), cfg, disease_clf, subgroup_clf,
                          subgroup="C")
    assert trajectory.converged
    assert trajectory.final.p_disease <= 0.1
    assert trajectory.target_label == 0 and trajectory.subgroup == "C"


def test_default_subgroup_comes_from_the_classifier():
    trajectory = traverse(stack(np.zeros(W_DIM)), TraversalConfig(max_iterations=1),
                          disease_clf, subgroup_clf)
    assert trajectory.subgroup == "AA"


def test_per_scale_traversal_needs_per_scale_classifiers():
    with pytest.raises(ContractError):
        traverse(stack(np.zeros(W_DIM)), TraversalConfig(mode="per-scale"),
                 disease_clf, subgroup_clf, subgroup="AA")


def test_per_scale_traversal():
    disease = linear_classifier("disease", 2 * unit(W_DIM + 3, 2 * W_DIM),
                                style_mode="per-scale")
    subgroup = linear_classifier("subgroup", 2 * unit(1, 2 * W_DIM), bias=3.0,
                                 style_mode="per-scale")
    trajectory = traverse(stack(np.zeros(W_DIM)), TraversalConfig(mode="per-scale"),
                          disease, subgroup, subgroup="AA")
    assert trajectory.converged
    final = trajectory.final.styles
    assert not final.is_shared
    assert final.styles[1][3] > 0 and final.styles[0][3] == 0


def test_decode_endpoint():
    trajectory = traverse(stack(np.zeros(W_DIM)), TraversalConfig(), disease_clf,
                          subgroup_clf, subgroup="AA", starter_id=3)
    record = decode_endpoint(trajectory, generator, record_id=1000)
    assert record.id == 1000 and record.is_synthetic
    assert record.cell == ("AA", 1) and record.severity == 0
    assert record.data.starter_id == 3
    assert record.data.iterations == trajectory.iterations
    assert np.array_equal(record.x, generator.generate(trajectory.final.styles))


def test_decoding_a_rejected_trajectory():
    cfg = TraversalConfig(step_size=0, max_iterations=2)
    trajectory = traverse(stack(np.zeros(W_DIM)), cfg, disease_clf, subgroup_clf,
                          subgroup="AA")
    with pytest.raises(TrajectoryRejectedError) as error:
        decode_endpoint(trajectory, generator)
    assert error.value.outcome == "max-iters"


def test_backtracking_step_size():
    cfg = TraversalConfig(step_size=100.0)
    w0 = np.zeros(W_DIM)
    step_size = backtracking_step_size(w0, 1, cfg, disease_clf, subgroup_clf)
    value, gradient = traversal_objective(w0, w0, 1, cfg, disease_clf, subgroup_clf)
    new_value, _ = traversal_objective(w0 - step_size * gradient, w0, 1, cfg,
                                       disease_clf, subgroup_clf)
    assert step_size < 100.0
    assert new_value <= value - 1e-4 * step_size * gradient @ gradient


def test_vacuous_criteria_accept_every_sample():
    criteria = StarterCriteria(min_subgroup_probability=0,
                               max_disease_probability=1)
    starters, acceptance_rate = select_starters(5, generator, disease_clf,
                                                subgroup_clf, criteria, Rng(4))
    assert acceptance_rate == 1.0
    assert [s.index for s in starters] == [0, 1, 2, 3, 4]


def test_starter_budget_error():
    criteria = StarterCriteria(min_subgroup_probability=1.0, budget=100)
    with pytest.raises(StarterBudgetError) as error:
        select_starters(5, generator, disease_clf, subgroup_clf, criteria, Rng(4))
    assert error.value.starters == []
    assert error.value.acceptance_rate == 0


def test_starter_criteria():
    criteria = StarterCriteria()
    accepted = criteria.accepts(np.array([0.05, 0.05, 0.5]),
                                np.array([0.95, 0.5, 0.95]))
    assert list(accepted) == [True, False, False]
    healthy_source = StarterCriteria(subgroup="C", source_label=1)
    assert list(healthy_source.accepts(np.array([0.95]), np.array([0.05]))) == [True]
    assert criteria.sample_budget(10) == 1000
    assert criteria.sample_budget(100) == 5000


@pytest.mark.parametrize("parameters", [dict(threshold=0.5), dict(step_size=-1),
                                        dict(mode="diagonal"), dict(target_label=2),
                                        dict(metric="fisher"), dict(rcond=0)])
def test_invalid_traversal_configs(parameters):
    with pytest.raises(ValueError):
        TraversalConfig(**parameters)


def test_trajectories_dataframe():
    trajectory = traverse(stack(np.zeros(W_DIM)), TraversalConfig(max_iterations=3),
                          disease_clf, subgroup_clf, subgroup="AA")
    df = trajectories_dataframe([trajectory, trajectory])
    assert list(df.columns[:6]) == ["starter_id", "iter", "p_disease",
                                    "p_subgroup", "objective", "w0"]
    assert df.shape == (2 * len(trajectory.states), 5 + 2 * W_DIM)
    assert len(trajectories_dataframe([])) == 0


@pytest.mark.parametrize("seed", range(5))
def test_proximal_steps_do_not_increase_the_objective(seed):
    rng = Rng(100 + seed)
    disease = ClassifierModel("disease", "latent", W_DIM, rng=rng.child(0),
                              hidden=(8,))
    subgroup = ClassifierModel("subgroup", "latent", W_DIM, rng=rng.child(1),
                               hidden=(8,))
    cfg = TraversalConfig(anchor_weight=0.5, threshold=0.999, max_iterations=100)
    w0 = rng.normal(W_DIM)
    step_size = backtracking_step_size(w0, 1, cfg, disease, subgroup,
                                       initial=1.0)
    trajectory = traverse(stack(w0), cfg.copy(step_size=step_size / 4), disease,
                          subgroup, subgroup="AA")
    changes = np.diff([state.objective for state in trajectory.states])
    assert len(changes) > 0
    assert np.mean(changes <= 1e-9) >= 0.95


@pytest.mark.parametrize("mode, width", [("shared", W_DIM),
                                         ("per-scale", 2 * W_DIM)])
def test_generator_jacobian_against_finite_differences(mode, width):
    w = Rng(30).normal(width)
    jacobian = generator_jacobian(w, generator, mode=mode)
    assert jacobian.shape == (generator.x_dim, width)

    def features(v):
        return generator.generate(StyleStack.from_vector(v, 2, mode=mode))

    h = 1e-6
    for i in range(0, width, 7):
        up, down = w.copy(), w.copy()
        up[i] += h
        down[i] -= h
        numerical = (features(up) - features(down)) / (2 * h)
        assert np.allclose(jacobian[:, i], numerical, rtol=1e-4, atol=1e-6)


def test_generator_jacobian_width_mismatch():
    with pytest.raises(ContractError):
        generator_jacobian(np.zeros(W_DIM + 1), generator, mode="per-scale")


def test_generator_metric_direction():
    rng = Rng(31)
    jacobian = rng.normal((64, W_DIM))
    gradient = rng.normal(W_DIM)
    direction = generator_metric_direction(gradient, jacobian, rcond=1e-6)
    assert np.linalg.norm(direction) == pytest.approx(np.linalg.norm(gradient))
    assert direction @ gradient > 0
    # Best first-order decrease per unit of decoded change.
    assert (direction @ gradient) / np.linalg.norm(jacobian @ direction) >= (
        gradient @ gradient) / np.linalg.norm(jacobian @ gradient) - 1e-9
    identity = generator_metric_direction(gradient, np.eye(W_DIM))
    assert np.allclose(identity, gradient)


def test_generator_metric_needs_a_generator():
    with pytest.raises(ContractError):
        traverse(stack(np.zeros(W_DIM)), TraversalConfig(metric="generator"),
                 disease_clf, subgroup_clf, subgroup="AA")


def test_generator_metric_traversal_converges():
    _, _, vt = np.linalg.svd(generator_jacobian(np.zeros(W_DIM), generator))
    disease = linear_classifier("disease", 2 * vt[0])
    cfg = TraversalConfig(metric="generator", subgroup_weight=0,
                          max_iterations=500)
    trajectory = traverse(stack(np.zeros(W_DIM)), cfg, disease, subgroup_clf,
                          subgroup="AA", generator=generator)
    assert trajectory.converged
    assert trajectory.final.p_disease > trajectory.initial.p_disease
