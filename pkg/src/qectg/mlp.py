"""Small dense feed-forward classifier trained from scratch.

One implementation serves both network roles in the decoding pipelines:
the 4-class net that proposes a logical correction and the 2-class gate
that predicts whether any correction is needed.  Hidden layers use the
rectifier; the output layer is a softmax.  Training is mini-batch
gradient descent with momentum, deterministic for a fixed seed, with
exact analytic gradients (checked against finite differences in the
suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .validation import as_sample_weight

__all__ = [
    "MlpClassifier",
    "MlpModel",
    "TrainConfig",
    "forward",
    "init_mlp",
    "load_model",
    "loss_grad",
    "save_model",
    "train",
]


@dataclass
class MlpModel:
    """Dense network parameters; weights[l] has shape (fan_in, fan_out)."""

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    seed: int = 0

    def copy(self) -> "MlpModel":
        return MlpModel(
            dims=self.dims,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            seed=self.seed,
        )

    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    momentum: float = 0.9
    batch_size: int = 128
    epochs: int = 30
    l2_penalty: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def init_mlp(dims, seed: int = 0) -> MlpModel:
    """Zero-bias model with weights uniform in +-1/sqrt(fan_in)."""
    dims = tuple(int(v) for v in dims)
    if len(dims) < 2 or any(v < 1 for v in dims):
        raise ValueError(f"need at least (input, output) positive dims, got {dims}")
    if dims[-1] not in (2, 4):
        raise ValueError(f"output dim must be 2 or 4, got {dims[-1]}")
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-scale, scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims=dims, weights=weights, biases=biases, seed=int(seed))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _forward_cached(m: MlpModel, X: np.ndarray):
    """Returns (probabilities, per-layer activations incl. input)."""
    acts = [X]
    h = X
    last = len(m.weights) - 1
    for l, (w, b) in enumerate(zip(m.weights, m.biases)):
        h = h @ w + b
        if l < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    return _softmax(acts[-1]), acts


def forward(m: MlpModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities; accepts one sample (1-d) or a batch (2-d)."""
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != m.dims[0]:
        raise ValueError(f"input dim {X.shape[1]} does not match model ({m.dims[0]})")
    probs, _ = _forward_cached(m, X)
    return probs[0] if single else probs


def loss_grad(m: MlpModel, X, Y, l2_penalty: float = 0.0, sample_weight=None):
    """Weighted mean cross-entropy plus L2 term, with analytic gradients.

    Y is one-hot (n, out_dim).  The L2 term is 0.5 * l2 * sum of squared
    weights (biases excluded).  Returns (loss, (weight_grads, bias_grads)).
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("loss_grad needs a nonempty batch")
    w = as_sample_weight(sample_weight, len(X))
    w = w / w.sum()
    probs, acts = _forward_cached(m, X)
    eps = 1e-300  # guards log(0) from exactly-saturated rows
    ce = -np.sum(w * np.sum(Y * np.log(probs + eps), axis=1))
    loss = ce + 0.5 * l2_penalty * sum(float(np.sum(wt * wt)) for wt in m.weights)
    g_w = [np.empty_like(wt) for wt in m.weights]
    g_b = [np.empty_like(b) for b in m.biases]
    delta = (probs - Y) * w[:, None]
    for l in range(len(m.weights) - 1, -1, -1):
        g_w[l] = acts[l].T @ delta + l2_penalty * m.weights[l]
        g_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ m.weights[l].T) * (acts[l] > 0)
    return loss, (g_w, g_b)


def train(m: MlpModel, X, Y, cfg: TrainConfig, sample_weight=None):
    """Momentum SGD over shuffled mini-batches; returns (model, loss trace).

    The input model is not mutated.  Aborts with a diagnostic if the loss
    leaves the finite range.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[1] != m.dims[0] or Y.shape[1] != m.dims[-1]:
        raise ValueError("training data dims do not match the model")
    w = as_sample_weight(sample_weight, len(X))
    model = m.copy()
    vel_w = [np.zeros_like(wt) for wt in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    trace: list[float] = []
    n = len(X)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        batches = 0
        for lo in range(0, n, cfg.batch_size):
            sel = order[lo : lo + cfg.batch_size]
            loss, (g_w, g_b) = loss_grad(
                model, X[sel], Y[sel], cfg.l2_penalty, w[sel]
            )
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}: loss={loss!r}; "
                    "lower the learning rate"
                )
            for l in range(len(model.weights)):
                vel_w[l] = cfg.momentum * vel_w[l] - cfg.learning_rate * g_w[l]
                vel_b[l] = cfg.momentum * vel_b[l] - cfg.learning_rate * g_b[l]
                model.weights[l] += vel_w[l]
                model.biases[l] += vel_b[l]
            epoch_loss += loss
            batches += 1
        trace.append(epoch_loss / batches)
    return model, trace


_MODEL_MAGIC = "qectg-mlp v1"


def save_model(m: MlpModel, path) -> None:
    """Versioned plain text; values at full precision for exact round trips."""
    lines = [
        _MODEL_MAGIC,
        "dims " + " ".join(str(v) for v in m.dims),
        f"seed {m.seed}",
    ]
    for l, (w, b) in enumerate(zip(m.weights, m.biases)):
        lines.append(f"layer {l}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in b))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> MlpModel:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    try:
        if lines[0] != _MODEL_MAGIC:
            raise ValueError(f"unsupported model file header: {lines[0]!r}")
        dims = tuple(int(v) for v in lines[1].split()[1:])
        seed = int(lines[2].split()[1])
        weights, biases = [], []
        pos = 3
        for l, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
            if lines[pos].split() != ["layer", str(l)]:
                raise ValueError(f"malformed layer header at line {pos + 1}")
            block = lines[pos + 1 : pos + 2 + fan_in]
            if len(block) < fan_in + 1:
                raise ValueError("truncated layer block")
            w = np.array([[float(v) for v in row.split()] for row in block[:fan_in]])
            b = np.array([float(v) for v in block[fan_in].split()])
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise ValueError(f"layer {l} has wrong shape")
            weights.append(w)
            biases.append(b)
            pos += 2 + fan_in
    except (IndexError, ValueError) as exc:
        raise ValueError(f"invalid model file {path}: {exc}") from exc
    return MlpModel(dims=dims, weights=weights, biases=biases, seed=seed)


class MlpClassifier(BaseEstimator, ClassifierMixin):
    """sklearn-style front end over the functional training core.

    ``classes`` pins the label set when the training subset may not
    contain every class (the 4-class net of the gated pipeline trains on
    non-identity records only but must keep all four outputs).
    """

    def __init__(
        self,
        hidden_layer_sizes=(128, 64),
        learning_rate: float = 0.05,
        momentum: float = 0.9,
        batch_size: int = 128,
        epochs: int = 30,
        l2_penalty: float = 0.0,
        seed: int = 0,
        classes=None,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.l2_penalty = l2_penalty
        self.seed = seed
        self.classes = classes

    def fit(self, X, y, sample_weight=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y).reshape(-1)
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError("X must be (n, features) aligned with y")
        self.classes_ = np.array(
            sorted(set(np.unique(y)) | set(self.classes or ())), dtype=np.int64
        )
        index = {c: i for i, c in enumerate(self.classes_)}
        onehot = np.zeros((len(y), len(self.classes_)))
        onehot[np.arange(len(y)), [index[v] for v in y]] = 1.0
        dims = (X.shape[1], *self.hidden_layer_sizes, len(self.classes_))
        cfg = TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs,
            l2_penalty=self.l2_penalty,
            seed=self.seed,
        )
        self.model_, self.loss_trace_ = train(
            init_mlp(dims, self.seed), X, onehot, cfg, sample_weight
        )
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        return forward(self.model_, np.asarray(X, dtype=np.float64))

    def predict(self, X):
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=-1)]
