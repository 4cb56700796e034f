import numpy as np
import pytest

from latentfair.ndcore import (
    Tensor,
    Tape,
    MLP,
    OptimState,
    Rng,
    DimensionError,
    NonFiniteError,
    ContractError,
    matmul,
    mul,
    total,
    mean,
    bce_with_logits,
    instance_norm,
    sigmoid,
)


def naive_matmul(a, b):
    result = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                result[i, j] += a[i, k] * b[k, j]
    return result


@pytest.mark.parametrize("shapes", [((2, 3), (3, 4)), ((1, 5), (5, 1)), ((4, 4), (4, 2))])
def test_matmul_against_triple_loop(shapes):
    rng = Rng(3)
    a, b = rng.normal(shapes[0]), rng.normal(shapes[1])
    result = matmul(Tensor(a), Tensor(b)).data
    assert np.allclose(result, naive_matmul(a, b), atol=1e-12)


def test_matmul_dimension_error():
    with pytest.raises(DimensionError):
        matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


def test_tensor_creation_errors():
    with pytest.raises(DimensionError):
        Tensor(np.zeros((2, 2, 2)))
    with pytest.raises(NonFiniteError):
        Tensor([1.0, np.inf])


def test_bce_of_zero_logit_is_ln2():
    loss = bce_with_logits(Tensor([0.0]), [1])
    assert loss.item() == pytest.approx(np.log(2), abs=1e-12)
    loss = bce_with_logits(Tensor([0.0]), [0])
    assert loss.item() == pytest.approx(np.log(2), abs=1e-12)


def test_bce_rejects_soft_targets_unless_allowed():
    with pytest.raises(ValueError):
        bce_with_logits(Tensor([0.3]), [0.4])
    assert bce_with_logits(Tensor([0.3]), [0.4], soft=True).item() > 0


def test_sigmoid_is_stable():
    values = sigmoid(Tensor([-800.0, 0.0, 800.0])).data
    assert np.allclose(values, [0, 0.5, 1])


def test_duplicate_leaf_names():
    tape = Tape()
    tape.parameter(np.zeros(2), "w")
    with pytest.raises(ContractError):
        tape.leaf(np.zeros(2), "w")


def test_backward_needs_scalar():
    tape = Tape()
    x = tape.leaf(np.ones((2, 2)), "x")
    with pytest.raises(ContractError):
        tape.backward(mul(x, x))


def test_untouched_parameters_get_zero_gradient():
    tape = Tape()
    x = tape.leaf(np.ones(3), "x")
    tape.parameter(np.ones((2, 2)), "unused")
    grads = tape.backward(total(mul(x, x)))
    assert np.allclose(grads["x"], 2 * np.ones(3))
    assert np.allclose(grads["unused"], np.zeros((2, 2)))


def mlp_loss(mlp, x, targets, tape=None):
    return mean(bce_with_logits(mlp(Tensor(x), tape=tape), targets))


@pytest.mark.parametrize("seed", range(50))
def test_mlp_gradients_against_finite_differences(seed):
    rng = Rng(seed)
    mlp = MLP([3, 4, 1], rng=rng, name="net", activation="tanh")
    x = rng.normal((6, 3))
    targets = (rng.uniform((6, 1)) > 0.5).astype(float)
    tape = Tape()
    grads = tape.backward(mlp_loss(mlp, x, targets, tape=tape))
    h = 1e-6
    for name, array in mlp.parameters().items():
        numerical = np.zeros_like(array)
        for index in np.ndindex(*array.shape):
            original = array[index]
            array[index] = original + h
            up = mlp_loss(mlp, x, targets).item()
            array[index] = original - h
            down = mlp_loss(mlp, x, targets).item()
            array[index] = original
            numerical[index] = (up - down) / (2 * h)
        assert np.allclose(grads[name], numerical, rtol=1e-4, atol=1e-8)


def test_instance_norm_gradient():
    rng = Rng(7)
    x0 = rng.normal((2, 5))
    weights = rng.normal((2, 5))

    def loss(x, tape=None):
        leaf = Tensor(x) if tape is None else tape.leaf(x, "x")
        return total(mul(instance_norm(leaf), Tensor(weights)))

    tape = Tape()
    grad = tape.backward(loss(x0, tape))["x"]
    h = 1e-6
    numerical = np.zeros_like(x0)
    for index in np.ndindex(*x0.shape):
        up, down = x0.copy(), x0.copy()
        up[index] += h
        down[index] -= h
        numerical[index] = (loss(up).item() - loss(down).item()) / (2 * h)
    assert np.allclose(grad, numerical, rtol=1e-4, atol=1e-7)


def test_adam_first_step():
    params = {"w": np.array([1.0])}
    OptimState("adam", learning_rate=0.1).step(params, {"w": np.array([0.5])})
    # Bias-corrected first step moves by the learning rate.
    assert params["w"][0] == pytest.approx(0.9, abs=1e-6)


def test_sgd_step():
    params = {"w": np.array([1.0, 2.0])}
    OptimState("sgd", learning_rate=0.5).step(params, {"w": np.array([1.0, -1.0])})
    assert np.allclose(params["w"], [0.5, 2.5])


def test_optimizer_rejects_bad_gradients():
    opt = OptimState("adam")
    params = {"w": np.array([1.0])}
    with pytest.raises(NonFiniteError):
        opt.step(params, {"w": np.array([np.nan])})
    with pytest.raises(DimensionError):
        opt.step(params, {"w": np.array([1.0, 2.0])})
    assert params["w"][0] == 1.0
    with pytest.raises(ValueError):
        OptimState("adam", learning_rate=0)


def test_rng_determinism_and_streams():
    assert np.array_equal(Rng(42).normal(10), Rng(42).normal(10))
    assert not np.array_equal(Rng(42).normal(10), Rng(42, stream=1).normal(10))
    assert np.array_equal(Rng(42).child(3).uniform(5), Rng(42).child(3).uniform(5))
    assert not np.array_equal(Rng(42).child(3).uniform(5),
                              Rng(42).child(4).uniform(5))


def test_rng_normal_statistics():
    values = Rng(0).normal(100000)
    assert abs(values.mean()) < 0.02
    assert abs(values.std() - 1) < 0.02


def test_rng_permutation_is_bijection():
    assert sorted(Rng(5).permutation(50)) == list(range(50))
    with pytest.raises(ValueError):
        Rng(-1)
