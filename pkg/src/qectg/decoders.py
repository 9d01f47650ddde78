"""Trained decoding pipelines built on the naive router.

Both pipelines first apply the naive event-routing corrections, then use
learned models to decide which logical operator (if any) must be composed
on top to cancel the router's residual logical action:

* DistributedDecoder: tile tables turn the syndrome into per-tile class
  probabilities; a 4-class net picks the logical correction.
* GatedDecoder: a 2-class net on the raw syndrome first predicts whether
  any logical correction is needed; only flagged syndromes reach the
  4-class net, which is trained on the harder (non-identity) records only.

Every output composes the router's frame with a logical operator frame,
so syndrome reproduction is inherited from the router.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .lattice import Lattice, LogicalClass, PauliFrame, build_lattice
from .mlp import MlpClassifier
from .simple import decode_simple_batch
from .tiles import TileFeatureMap
from .validation import as_bit_matrix, as_class_vector, as_sample_weight

__all__ = ["DistributedDecoder", "GatedDecoder", "logical_frame"]


def logical_frame(lat: Lattice, cls: LogicalClass) -> PauliFrame:
    """The logical operator that cancels a residual of class ``cls``."""
    cls = LogicalClass(cls)
    frame = PauliFrame.identity(lat.data_count)
    if cls in (LogicalClass.X, LogicalClass.Y):
        frame.x_bits ^= lat.logical_x_mask
    if cls in (LogicalClass.Z, LogicalClass.Y):
        frame.z_bits ^= lat.logical_z_mask
    return frame


def _apply_logical(lat: Lattice, x, z, classes: np.ndarray) -> None:
    """Compose per-row logical frames (in place) chosen by class index."""
    is_x = (classes == LogicalClass.X) | (classes == LogicalClass.Y)
    is_z = (classes == LogicalClass.Z) | (classes == LogicalClass.Y)
    x[is_x] ^= lat.logical_x_mask
    z[is_z] ^= lat.logical_z_mask


def _mlp_params(est) -> dict:
    return dict(
        hidden_layer_sizes=est.hidden_layer_sizes,
        learning_rate=est.learning_rate,
        momentum=est.momentum,
        batch_size=est.batch_size,
        epochs=est.epochs,
        l2_penalty=est.l2_penalty,
        seed=est.seed,
    )


class DistributedDecoder(BaseEstimator):
    """Naive router + tile-table features + 4-class corrector net."""

    kind = "distributed"

    def __init__(
        self,
        distance: int = 5,
        smoothing: float = 1.0,
        hidden_layer_sizes=(128, 64),
        learning_rate: float = 0.05,
        momentum: float = 0.9,
        batch_size: int = 128,
        epochs: int = 30,
        l2_penalty: float = 0.0,
        seed: int = 0,
    ):
        self.distance = distance
        self.smoothing = smoothing
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.l2_penalty = l2_penalty
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        """X: raw syndromes (n, d^2-1); y: residual classes after routing."""
        self.lattice_ = build_lattice(self.distance)
        S = as_bit_matrix(X, self.lattice_.check_count, "X")
        labels = as_class_vector(y, len(S))
        w = as_sample_weight(sample_weight, len(S))
        present = np.unique(labels)
        if len(present) < 4:
            import warnings

            warnings.warn(
                f"training data covers only classes {present.tolist()}; "
                "the corrector keeps all four outputs",
                stacklevel=2,
            )
        self.feature_map_ = TileFeatureMap(self.distance, self.smoothing).fit(
            S, labels, sample_weight
        )
        feats = self.feature_map_.transform(S)
        self.net_ = MlpClassifier(classes=(0, 1, 2, 3), **_mlp_params(self)).fit(
            feats, labels, w
        )
        return self

    def predict(self, X) -> np.ndarray:
        """Predicted residual class of the router, per syndrome row."""
        check_is_fitted(self, "net_")
        return self.net_.predict(self.feature_map_.transform(X))

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        check_is_fitted(self, "net_")
        S = as_bit_matrix(syndromes, self.lattice_.check_count, "syndromes")
        x, z = decode_simple_batch(self.lattice_, S)
        _apply_logical(self.lattice_, x, z, self.predict(S))
        return x, z

    def decode(self, syndrome: np.ndarray) -> PauliFrame:
        x, z = self.decode_batch(np.asarray(syndrome, dtype=np.uint8)[None, :])
        return PauliFrame(x[0], z[0])


class GatedDecoder(BaseEstimator):
    """Gate net on raw syndromes; corrector net on the flagged subset.

    The gate input width is the full syndrome length d^2-1.  The 4-class
    corrector trains only on records whose routed residual is not I but
    keeps all four output classes.
    """

    kind = "gated"

    def __init__(
        self,
        distance: int = 5,
        smoothing: float = 1.0,
        hidden_layer_sizes=(128, 64),
        learning_rate: float = 0.05,
        momentum: float = 0.9,
        batch_size: int = 128,
        epochs: int = 30,
        l2_penalty: float = 0.0,
        seed: int = 0,
    ):
        self.distance = distance
        self.smoothing = smoothing
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.l2_penalty = l2_penalty
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        self.lattice_ = build_lattice(self.distance)
        S = as_bit_matrix(X, self.lattice_.check_count, "X")
        labels = as_class_vector(y, len(S))
        w = as_sample_weight(sample_weight, len(S))
        gate_labels = (labels != LogicalClass.I).astype(np.int64)
        self.gate_ = MlpClassifier(classes=(0, 1), **_mlp_params(self)).fit(
            S.astype(np.float64), gate_labels, w
        )
        # Tables see every record; only the corrector's sample set shrinks.
        self.feature_map_ = TileFeatureMap(self.distance, self.smoothing).fit(
            S, labels, sample_weight
        )
        hard = gate_labels == 1
        if not np.any(hard):
            raise ValueError("no non-identity records; cannot train the corrector net")
        feats = self.feature_map_.transform(S[hard])
        self.net_ = MlpClassifier(classes=(0, 1, 2, 3), **_mlp_params(self)).fit(
            feats, labels[hard], w[hard]
        )
        self.hard_fraction_ = float(hard.mean())
        return self

    def predict(self, X) -> np.ndarray:
        """Gate-masked residual class prediction (0 where the gate says I)."""
        check_is_fitted(self, "net_")
        S = as_bit_matrix(X, self.lattice_.check_count, "X")
        out = np.zeros(len(S), dtype=np.int64)
        flagged = self.gate_.predict(S.astype(np.float64)) == 1
        if np.any(flagged):
            out[flagged] = self.net_.predict(self.feature_map_.transform(S[flagged]))
        return out

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        check_is_fitted(self, "net_")
        S = as_bit_matrix(syndromes, self.lattice_.check_count, "syndromes")
        x, z = decode_simple_batch(self.lattice_, S)
        _apply_logical(self.lattice_, x, z, self.predict(S))
        return x, z

    def decode(self, syndrome: np.ndarray) -> PauliFrame:
        x, z = self.decode_batch(np.asarray(syndrome, dtype=np.uint8)[None, :])
        return PauliFrame(x[0], z[0])
