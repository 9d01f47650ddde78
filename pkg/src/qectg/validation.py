"""Input validation helpers shared by estimators, decoders and the CLI."""

from __future__ import annotations

import numpy as np

__all__ = ["as_bit_matrix", "as_class_vector", "as_sample_weight", "check_probability"]


def as_bit_matrix(X, n_bits: int, name: str = "X") -> np.ndarray:
    """Coerce to a 2-d uint8 matrix of 0/1 values with n_bits columns."""
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != n_bits:
        raise ValueError(f"{name} must have shape (n, {n_bits}), got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError(f"{name} must contain only 0/1 bits")
    return arr.astype(np.uint8)


def as_class_vector(y, n_rows: int) -> np.ndarray:
    """Coerce to an int64 vector of class indices 0..3."""
    arr = np.asarray(y).reshape(-1).astype(np.int64)
    if len(arr) != n_rows:
        raise ValueError(f"y has {len(arr)} rows, expected {n_rows}")
    if arr.size and (arr.min() < 0 or arr.max() > 3):
        raise ValueError("class labels must lie in 0..3 (I, X, Z, Y)")
    return arr


def as_sample_weight(w, n_rows: int) -> np.ndarray:
    """Default to unit weights; reject negatives and size mismatches."""
    if w is None:
        return np.ones(n_rows, dtype=np.float64)
    arr = np.asarray(w, dtype=np.float64).reshape(-1)
    if len(arr) != n_rows:
        raise ValueError(f"sample_weight has {len(arr)} rows, expected {n_rows}")
    if arr.size and arr.min() < 0:
        raise ValueError("sample_weight must be nonnegative")
    return arr


def check_probability(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return p
