import numpy as np
import pytest

from modemlab import mlp as M
from modemlab import rng
from modemlab.errors import DivergenceError


def finite_difference_grads(net, X, B, eps=1e-5):
    """Central-difference oracle for every weight and bias component."""
    gw = [np.zeros_like(w) for w in net.weights]
    gb = [np.zeros_like(b) for b in net.biases]
    for params, grads in ((net.weights, gw), (net.biases, gb)):
        for p, g in zip(params, grads):
            flat = p.ravel()
            gf = g.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                lp = M.mse_loss(M.forward(net, X), B)
                flat[i] = orig - eps
                lm = M.mse_loss(M.forward(net, X), B)
                flat[i] = orig
                gf[i] = (lp - lm) / (2 * eps)
    return gw, gb


def assert_grads_close(analytic, numeric, rel=1e-4):
    for a, n in zip(analytic, numeric):
        scale = np.maximum(np.abs(a) + np.abs(n), 1e-8)
        assert (np.abs(a - n) / scale).max() < rel


def random_batch(seed, n, in_dim, out_dim):
    gen = rng.stream(seed, rng.ROLE_TEST)
    X = rng.normal(gen, (n, in_dim))
    B = (rng.normal(gen, (n, out_dim)) > 0).astype(float)
    return X, B


def test_zero_net_outputs_half():
    net = M.init_mlp([3, 4, 2], seed=0)
    for w in net.weights:
        w[:] = 0.0
    out = M.forward(net, np.zeros(3))
    assert out == pytest.approx(np.full(2, 0.5))


def test_single_layer_identity_zero_input():
    net = M.Mlp(dims=[2, 2], weights=[np.eye(2)], biases=[np.zeros(2)])
    assert M.forward(net, np.zeros(2)) == pytest.approx(np.full(2, 0.5))


def test_forward_deterministic():
    net = M.init_mlp([4, 8, 2], seed=3)
    x = rng.normal(rng.stream(1, rng.ROLE_TEST), 4)
    assert np.array_equal(M.forward(net, x), M.forward(net, x))


def test_forward_dim_mismatch():
    net = M.init_mlp([4, 8, 2], seed=3)
    with pytest.raises(ValueError):
        M.forward(net, np.zeros(5))


def test_mse_loss_examples():
    assert M.mse_loss(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 0.0
    assert M.mse_loss(np.array([0.5, 0.5]), np.array([1.0, 0.0])) == pytest.approx(0.25)
    assert M.mse_loss(np.array([0.0]), np.array([1.0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        M.mse_loss(np.zeros(2), np.zeros(3))


def test_loss_zero_iff_exact():
    pred = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert M.mse_loss(pred, pred.copy()) == 0.0
    assert M.mse_loss(pred, 1 - pred) > 0


def test_gradients_match_finite_differences():
    net = M.init_mlp([4, 8, 4, 2], seed=11)
    X, B = random_batch(12, 6, 4, 2)
    _, gw, gb = M.backward(net, X, B)
    nw, nb = finite_difference_grads(net, X, B)
    assert_grads_close(gw, nw)
    assert_grads_close(gb, nb)


def test_zero_loss_batch_gives_zero_gradients():
    # linear output mode lets the net hit the targets exactly
    net = M.Mlp(dims=[2, 2], weights=[np.eye(2)], biases=[np.zeros(2)],
                output_activation="linear")
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    loss, gw, gb = M.backward(net, X, X.copy())
    assert loss == 0.0
    assert np.all(gw[0] == 0.0) and np.all(gb[0] == 0.0)


def test_mean_reduction_batch_duplication_invariant():
    net = M.init_mlp([3, 5, 2], seed=2)
    X, B = random_batch(4, 3, 3, 2)
    _, gw1, gb1 = M.backward(net, X, B)
    _, gw2, gb2 = M.backward(net, np.vstack([X, X]), np.vstack([B, B]))
    for a, b in zip(gw1 + gb1, gw2 + gb2):
        assert a == pytest.approx(b, abs=1e-12)


def test_adam_first_step_hand_value():
    net = M.Mlp(dims=[1, 1], weights=[np.zeros((1, 1))], biases=[np.zeros(1)],
                output_activation="linear")
    state = M.adam_init(net, lr=1e-3)
    M.adam_step(net, [np.ones((1, 1))], [np.zeros(1)], state)
    assert net.weights[0][0, 0] == pytest.approx(-1e-3, rel=1e-6)
    assert state.t == 1


def test_adam_zero_gradient_leaves_parameters():
    net = M.init_mlp([2, 3, 1], seed=0)
    before = [w.copy() for w in net.weights]
    state = M.adam_init(net)
    for _ in range(5):
        M.adam_step(net, [np.zeros_like(w) for w in net.weights],
                    [np.zeros_like(b) for b in net.biases], state)
    for w, b in zip(net.weights, before):
        assert np.array_equal(w, b)


def test_training_deterministic_per_seed():
    X, B = random_batch(5, 64, 4, 2)
    nets = []
    for _ in range(2):
        net = M.init_mlp([4, 8, 2], seed=7)
        M.train(net, (X, B), M.TrainConfig(epochs=3, batch_size=16, seed=7))
        nets.append(net)
    for a, b in zip(nets[0].weights, nets[1].weights):
        assert np.array_equal(a, b)


def test_zero_epochs_leaves_parameters():
    net = M.init_mlp([4, 8, 2], seed=7)
    before = [w.copy() for w in net.weights]
    X, B = random_batch(5, 16, 4, 2)
    history = M.train(net, (X, B), M.TrainConfig(epochs=0, seed=1))
    assert history == []
    for w, b in zip(net.weights, before):
        assert np.array_equal(w, b)


def test_memorizes_single_sample():
    X = np.tile(np.array([[0.5, -1.0, 0.25]]), (32, 1))
    B = np.tile(np.array([[1.0, 0.0]]), (32, 1))
    net = M.init_mlp([3, 16, 2], seed=1)
    history = M.train(net, (X, B), M.TrainConfig(epochs=150, batch_size=8, seed=1))
    assert history[-1] < history[0]
    assert history[-1] < 5e-3
    assert M.predict_bits(net, X[0]).tolist() == [1, 0]


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises_with_step():
    X, B = random_batch(6, 32, 4, 2)
    X[0, 0] = np.inf
    net = M.init_mlp([4, 8, 2], seed=1)
    with pytest.raises(DivergenceError):
        M.train(net, (X, B), M.TrainConfig(epochs=1, batch_size=8, seed=1))


def test_predict_bits_threshold_and_tie():
    net = M.Mlp(dims=[2, 2], weights=[np.zeros((2, 2))],
                biases=[np.array([10.0, -10.0])])
    assert M.predict_bits(net, np.zeros(2)).tolist() == [1, 0]
    tie = M.Mlp(dims=[2, 2], weights=[np.zeros((2, 2))], biases=[np.zeros(2)])
    assert M.predict_bits(tie, np.zeros(2)).tolist() == [1, 1]  # 0.5 -> 1


def test_interleave_complex():
    Y = np.array([[1 + 2j, 3 - 4j]])
    out = M.interleave_complex(Y)
    assert out.tolist() == [[1.0, 2.0, 3.0, -4.0]]


def test_model_file_round_trip(tmp_path):
    net = M.init_mlp([4, 8, 2], seed=9)
    path = tmp_path / "model.mlp"
    M.save_model(net, path, extra={"task": "demod"})
    back, extra = M.load_model(path)
    assert back.dims == net.dims
    assert extra == {"task": "demod"}
    for a, b in zip(net.weights + net.biases, back.weights + back.biases):
        assert np.array_equal(a, b)
    # identical saves are byte-identical
    path2 = tmp_path / "model2.mlp"
    M.save_model(net, path2, extra={"task": "demod"})
    assert path.read_bytes() == path2.read_bytes()


def test_model_file_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.mlp"
    path.write_bytes(b"NOTAMODEL\n{}\n")
    with pytest.raises(ValueError):
        M.load_model(path)
