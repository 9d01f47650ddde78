"""Deterministic, parallel-safe depolarizing noise.

Uniform variates come from a stateless counter hash keyed by
(master_seed, stream_key, draw_index), so a trial's error pattern is a
pure function of (master_seed, trial index) no matter how trials are
batched or spread across workers.  The mixer is the splitmix64 finalizer
applied after each absorbed key word; its output quality is pinned by
statistical tests in the suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, PauliFrame

__all__ = ["TrialRng", "sample_depolarizing", "sample_depolarizing_batch", "uniform_grid"]

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MULT = np.uint64(0xC2B2AE3D27D4EB4F)
_INV_2_53 = float(2.0**-53)


def _mix(h: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; numpy uint64 arithmetic wraps mod 2^64
    h = h.astype(np.uint64, copy=True)
    h ^= h >> np.uint64(30)
    h *= np.uint64(0xBF58476D1CE4E5B9)
    h ^= h >> np.uint64(27)
    h *= np.uint64(0x94D049BB133111EB)
    h ^= h >> np.uint64(31)
    return h


def uniform_grid(master_seed: int, stream_keys: np.ndarray, draws: int) -> np.ndarray:
    """Uniform [0,1) variates, shape (len(stream_keys), draws).

    Entry (i, j) depends only on (master_seed, stream_keys[i], j).
    """
    keys = np.asarray(stream_keys, dtype=np.uint64).reshape(-1, 1)
    idx = np.arange(draws, dtype=np.uint64).reshape(1, -1)
    h = _mix(np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF) ^ (keys * _GOLDEN))
    h = _mix(h ^ (idx * _MULT))
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


@dataclass(frozen=True)
class TrialRng:
    """One reproducible stream, keyed by (master_seed, stream_key)."""

    master_seed: int
    stream_key: int

    def uniforms(self, draws: int) -> np.ndarray:
        return uniform_grid(self.master_seed, np.array([self.stream_key]), draws)[0]


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"error probability must be in [0, 1], got {p}")
    return p


def sample_depolarizing(lat: Lattice, p: float, rng: TrialRng) -> PauliFrame:
    """Draw one depolarizing error: each qubit gets X, Z or Y w.p. p/3 each.

    One uniform per qubit: u < p/3 -> X, < 2p/3 -> Z, < p -> Y, else identity.
    """
    p = _check_p(p)
    x, z = sample_depolarizing_batch(lat, p, rng.master_seed, np.array([rng.stream_key]))
    return PauliFrame(x[0], z[0])


def sample_depolarizing_batch(
    lat: Lattice, p: float, master_seed: int, stream_keys: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Draw one error frame per stream key; returns (x_bits, z_bits) matrices."""
    p = _check_p(p)
    u = uniform_grid(master_seed, stream_keys, lat.data_count)
    x = u < (p / 3)
    z = (u >= p / 3) & (u < 2 * p / 3)
    y = (u >= 2 * p / 3) & (u < p)
    return (x | y).astype(np.uint8), (z | y).astype(np.uint8)
