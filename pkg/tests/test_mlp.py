import math

import numpy as np
import pytest
from sklearn.base import clone

from qectg.mlp import (
    MlpClassifier,
    MlpModel,
    TrainConfig,
    forward,
    init_mlp,
    load_model,
    loss_grad,
    save_model,
    train,
)


def test_parameter_count_example():
    m = init_mlp((16, 128, 64, 4), seed=0)
    assert m.parameter_count() == 16 * 128 + 128 + 128 * 64 + 64 + 64 * 4 + 4 == 10692


def test_init_is_deterministic():
    a = init_mlp((8, 16, 4), seed=42)
    b = init_mlp((8, 16, 4), seed=42)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert all(not b_.any() for b_ in a.biases)


def test_init_scale_and_validation():
    m = init_mlp((100, 4), seed=1)
    assert np.abs(m.weights[0]).max() <= 0.1
    with pytest.raises(ValueError):
        init_mlp((5,), seed=0)
    with pytest.raises(ValueError):
        init_mlp((5, 3), seed=0)  # output dim must be 2 or 4
    with pytest.raises(ValueError):
        init_mlp((5, 0, 2), seed=0)


def test_zero_weight_model_gives_uniform_output():
    m = init_mlp((6, 4), seed=0)
    m.weights[0][:] = 0.0
    out = forward(m, np.ones(6))
    assert np.allclose(out, 0.25)


def test_forward_sums_to_one(rng):
    m = init_mlp((10, 32, 4), seed=7)
    X = rng.normal(size=(50, 10))
    probs = forward(m, X)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert probs.min() > 0


def test_forward_matches_hand_computed_softmax():
    m = MlpModel(
        dims=(2, 2),
        weights=[np.array([[1.0, -1.0], [0.5, 2.0]])],
        biases=[np.array([0.1, -0.2])],
    )
    x = np.array([2.0, 3.0])
    logits = [2 * 1.0 + 3 * 0.5 + 0.1, 2 * -1.0 + 3 * 2.0 - 0.2]  # [3.6, 3.8]
    ez = [math.exp(v - max(logits)) for v in logits]
    want = np.array(ez) / sum(ez)
    assert np.allclose(forward(m, x), want, atol=1e-12)


def test_forward_stable_for_large_inputs():
    m = init_mlp((4, 8, 4), seed=0)
    out = forward(m, np.array([1e3, -1e3, 1e3, -1e3]))
    assert np.all(np.isfinite(out))
    assert np.isclose(out.sum(), 1.0)


def test_forward_rejects_dim_mismatch():
    m = init_mlp((4, 2), seed=0)
    with pytest.raises(ValueError):
        forward(m, np.ones(5))


def test_uniform_prediction_loss_is_ln4():
    m = init_mlp((6, 4), seed=0)
    m.weights[0][:] = 0.0
    Y = np.eye(4)[np.array([0, 1, 2, 3, 0])]
    X = np.ones((5, 6))
    loss, _ = loss_grad(m, X, Y)
    assert loss == pytest.approx(math.log(4), abs=1e-12)


def test_confident_correct_prediction_loss_near_zero():
    m = MlpModel(dims=(2, 2), weights=[np.array([[40.0, -40.0], [0.0, 0.0]])],
                 biases=[np.zeros(2)])
    X = np.array([[1.0, 0.0], [-1.0, 0.0]])
    Y = np.array([[1.0, 0.0], [0.0, 1.0]])
    loss, _ = loss_grad(m, X, Y)
    assert loss < 1e-10


def _finite_difference_check(dims, seed, batch, l2=0.0, weighted=False, subsample=None):
    rng = np.random.default_rng(seed)
    m = init_mlp(dims, seed=seed)
    X = rng.normal(size=(batch, dims[0]))
    Y = np.eye(dims[-1])[rng.integers(0, dims[-1], batch)]
    w = rng.uniform(0.2, 2.0, batch) if weighted else None
    _, (g_w, g_b) = loss_grad(m, X, Y, l2, w)
    step = 1e-4
    worst = 0.0
    for l in range(len(m.weights)):
        for grads, params in ((g_w[l], m.weights[l]), (g_b[l], m.biases[l])):
            flat_p = params.reshape(-1)
            flat_g = grads.reshape(-1)
            idx = range(flat_p.size)
            if subsample is not None:
                idx = rng.choice(flat_p.size, size=min(subsample, flat_p.size), replace=False)
            for i in idx:
                orig = flat_p[i]
                flat_p[i] = orig + step
                hi, _ = loss_grad(m, X, Y, l2, w)
                flat_p[i] = orig - step
                lo, _ = loss_grad(m, X, Y, l2, w)
                flat_p[i] = orig
                num = (hi - lo) / (2 * step)
                denom = max(abs(num), abs(flat_g[i]), 1e-8)
                worst = max(worst, abs(num - flat_g[i]) / denom)
    return worst


@pytest.mark.parametrize("seed", range(10))
def test_gradients_match_finite_differences(seed):
    dims = [(5, 7, 4), (6, 8, 5, 2), (4, 4, 4), (3, 2)][seed % 4]
    worst = _finite_difference_check(dims, seed, batch=6, l2=0.01 if seed % 2 else 0.0,
                                     weighted=bool(seed % 3))
    assert worst < 1e-4


def test_gradients_match_at_production_shape():
    worst = _finite_difference_check((16, 128, 64, 4), seed=11, batch=8, l2=1e-4,
                                     subsample=40)
    assert worst < 1e-4


def test_loss_grad_rejects_empty_batch():
    m = init_mlp((4, 2), seed=0)
    with pytest.raises(ValueError):
        loss_grad(m, np.zeros((0, 4)), np.zeros((0, 2)))


def test_overfits_separable_data(rng):
    X = np.vstack([rng.normal(-2, 0.3, size=(16, 5)), rng.normal(2, 0.3, size=(16, 5))])
    Y = np.eye(2)[np.array([0] * 16 + [1] * 16)]
    cfg = TrainConfig(learning_rate=0.1, epochs=120, batch_size=8, seed=1)
    model, trace = train(init_mlp((5, 16, 2), seed=1), X, Y, cfg)
    acc = (forward(model, X).argmax(axis=1) == Y.argmax(axis=1)).mean()
    assert acc >= 0.99
    assert trace[-1] < trace[0]


def test_training_is_deterministic(rng):
    X = rng.normal(size=(64, 6))
    Y = np.eye(4)[rng.integers(0, 4, 64)]
    cfg = TrainConfig(epochs=5, seed=9)
    m1, t1 = train(init_mlp((6, 12, 4), seed=9), X, Y, cfg)
    m2, t2 = train(init_mlp((6, 12, 4), seed=9), X, Y, cfg)
    assert t1 == t2
    for a, b in zip(m1.weights, m2.weights):
        assert np.array_equal(a, b)


def test_training_does_not_mutate_input_model(rng):
    X = rng.normal(size=(32, 4))
    Y = np.eye(2)[rng.integers(0, 2, 32)]
    m0 = init_mlp((4, 2), seed=3)
    snapshot = [w.copy() for w in m0.weights]
    train(m0, X, Y, TrainConfig(epochs=2, seed=0))
    for a, b in zip(m0.weights, snapshot):
        assert np.array_equal(a, b)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # overflow precedes the abort
def test_divergence_aborts_with_diagnostic(rng):
    X = rng.normal(size=(32, 4)) * 100
    Y = np.eye(2)[rng.integers(0, 2, 32)]
    cfg = TrainConfig(learning_rate=1e6, epochs=50, seed=0)
    with pytest.raises(RuntimeError, match="diverged"):
        train(init_mlp((4, 8, 2), seed=0), X, Y, cfg)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_model_file_round_trip(tmp_path, rng):
    m = init_mlp((7, 9, 4), seed=4)
    # dirty the parameters so the file is not just the init pattern
    for w in m.weights:
        w += rng.normal(size=w.shape)
    path = tmp_path / "m.txt"
    save_model(m, path)
    loaded = load_model(path)
    assert loaded.dims == m.dims and loaded.seed == m.seed
    for a, b in zip(loaded.weights, m.weights):
        assert np.array_equal(a, b)
    X = rng.normal(size=(100, 7))
    assert np.array_equal(forward(loaded, X), forward(m, X))


def test_truncated_model_file_rejected(tmp_path):
    m = init_mlp((4, 6, 2), seed=0)
    path = tmp_path / "m.txt"
    save_model(m, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:5]))
    with pytest.raises(ValueError):
        load_model(path)


def test_hand_written_model_file(tmp_path):
    path = tmp_path / "hand.txt"
    path.write_text(
        "qectg-mlp v1\n"
        "dims 2 2 2\n"
        "seed 0\n"
        "layer 0\n"
        "1.0 0.0\n"
        "0.0 1.0\n"
        "0.0 0.0\n"
        "layer 1\n"
        "2.0 0.0\n"
        "0.0 2.0\n"
        "0.5 -0.5\n"
    )
    m = load_model(path)
    # x=(1,0): hidden=relu([1,0])=[1,0]; logits=[2.5,-0.5]; softmax by hand
    e = np.exp(np.array([2.5, -0.5]) - 2.5)
    assert np.allclose(forward(m, np.array([1.0, 0.0])), e / e.sum(), atol=1e-12)


def test_classifier_keeps_declared_classes(rng):
    X = rng.normal(size=(60, 5))
    y = rng.integers(1, 4, size=60)  # class 0 absent from the data
    clf = MlpClassifier(hidden_layer_sizes=(8,), epochs=3, seed=0, classes=(0, 1, 2, 3))
    clf.fit(X, y)
    assert list(clf.classes_) == [0, 1, 2, 3]
    assert clf.predict_proba(X).shape == (60, 4)


def test_classifier_sklearn_plumbing(rng):
    clf = MlpClassifier(hidden_layer_sizes=(4,), epochs=2, seed=1)
    cloned = clone(clf)
    assert cloned.get_params() == clf.get_params()
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 2, 40)
    preds = clf.fit(X, y).predict(X)
    assert preds.shape == (40,)
    assert set(preds) <= {0, 1}
