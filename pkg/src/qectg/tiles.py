"""Overlapping distance-3 tiles and their per-tile class-probability tables.

The lattice is segmented into ((d-1)/2)^2 overlapping windows, each
holding 8 whole parity checks arranged like a standalone distance-3 code.
A tile's 8-bit syndrome word indexes a 256-row table of smoothed empirical
probabilities over the four residual logical classes; concatenating the
rows of all tiles yields the classifier feature vector.  Checks shared by
two tiles replicate into both words.

The tables are the mechanism that keeps the input space fixed at 256 rows
per tile no matter how large the lattice grows.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .lattice import Lattice, build_lattice
from .validation import as_bit_matrix, as_class_vector, as_sample_weight

__all__ = [
    "Tile",
    "TileFeatureMap",
    "TileTableSet",
    "fit_tables",
    "load_tables",
    "make_features",
    "make_tiles",
    "save_tables",
    "slice_syndrome",
    "slice_syndrome_batch",
]

N_CLASSES = 4
WORDS = 256

# Tile-local plaquette offsets from the tile origin (R, C), in canonical
# word-bit order: top, bulk(0,0), bulk(0,1), left, right, bulk(1,0),
# bulk(1,1), bottom.
_LOCAL_OFFSETS = (
    (-1, 0),
    (0, 0),
    (0, 1),
    (1, -1),
    (0, 2),
    (1, 0),
    (1, 1),
    (2, 1),
)


@dataclass(frozen=True)
class Tile:
    """One window: even origin (R, C) plus its 8 global check ids."""

    origin: tuple[int, int]
    check_ids: tuple[int, ...]


def make_tiles(lat: Lattice) -> list[Tile]:
    """All overlapping windows, row-major by origin.

    d=3 degenerates to the single tile covering the whole lattice.
    """
    tiles = []
    for R in range(0, lat.d - 2, 2):
        for C in range(0, lat.d - 2, 2):
            ids = tuple(
                lat.plaquette_index[(R + dr, C + dc)] for dr, dc in _LOCAL_OFFSETS
            )
            tiles.append(Tile(origin=(R, C), check_ids=ids))
    return tiles


def _id_matrix(tiles: list[Tile]) -> np.ndarray:
    return np.array([t.check_ids for t in tiles], dtype=np.int64)


_BIT_VALUES = (1 << np.arange(8)).astype(np.int64)


def slice_syndrome(tiles: list[Tile], syndrome: np.ndarray) -> np.ndarray:
    """8-bit tile words for one syndrome; bit k is the k-th canonical check."""
    return slice_syndrome_batch(tiles, np.asarray(syndrome, dtype=np.uint8)[None, :])[0]


def slice_syndrome_batch(tiles: list[Tile], syndromes: np.ndarray) -> np.ndarray:
    """(n, check_count) syndromes -> (n, T) words in 0..255."""
    s = np.asarray(syndromes, dtype=np.uint8)
    return (s[:, _id_matrix(tiles)].astype(np.int64) @ _BIT_VALUES).astype(np.int64)


@dataclass
class TileTableSet:
    """Per-tile 256x4 class-probability tables with their provenance.

    ``probs[t, w]`` is the smoothed conditional distribution of the
    residual class given tile t saw word w; every row sums to 1 and all
    entries are positive.  ``counts`` holds the raw (possibly weighted)
    accumulators when the set was fitted locally; loaded sets carry only
    probabilities.
    """

    d: int
    origins: tuple[tuple[int, int], ...]
    alpha: float
    probs: np.ndarray  # (T, 256, 4) float64
    counts: np.ndarray | None = None
    dataset_digest: str = ""

    @property
    def tile_count(self) -> int:
        return self.probs.shape[0]


def fit_tables(
    lat: Lattice,
    syndromes: np.ndarray,
    classes: np.ndarray,
    sample_weight: np.ndarray | None = None,
    alpha: float = 1.0,
) -> TileTableSet:
    """Estimate per-tile conditional class tables by (weighted) counting.

    Probability of class c given word w is (count + alpha) over
    (row total + 4*alpha); unseen words therefore give uniform rows.
    """
    S = as_bit_matrix(syndromes, lat.check_count, "syndromes")
    y = as_class_vector(classes, len(S))
    w = as_sample_weight(sample_weight, len(S))
    if len(S) == 0:
        raise ValueError("cannot fit tile tables on an empty dataset")
    if alpha <= 0:
        raise ValueError("smoothing alpha must be positive")
    tiles = make_tiles(lat)
    words = slice_syndrome_batch(tiles, S)
    counts = np.zeros((len(tiles), WORDS, N_CLASSES), dtype=np.float64)
    for t in range(len(tiles)):
        flat = words[:, t] * N_CLASSES + y
        counts[t] += np.bincount(flat, weights=w, minlength=WORDS * N_CLASSES).reshape(
            WORDS, N_CLASSES
        )
    probs = (counts + alpha) / (counts.sum(axis=2, keepdims=True) + N_CLASSES * alpha)
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(S).tobytes())
    digest.update(np.ascontiguousarray(y).tobytes())
    if sample_weight is not None:
        digest.update(np.ascontiguousarray(w).tobytes())
    return TileTableSet(
        d=lat.d,
        origins=tuple(t.origin for t in tiles),
        alpha=float(alpha),
        probs=probs,
        counts=counts,
        dataset_digest=digest.hexdigest(),
    )


def make_features(tables: TileTableSet, words: np.ndarray) -> np.ndarray:
    """Concatenate table rows, tile-major: (..., T) words -> (..., 4T)."""
    w = np.asarray(words, dtype=np.int64)
    single = w.ndim == 1
    if single:
        w = w[None, :]
    if w.shape[1] != tables.tile_count:
        raise ValueError(f"expected {tables.tile_count} words per sample, got {w.shape[1]}")
    feats = tables.probs[np.arange(tables.tile_count), w].reshape(len(w), -1)
    return feats[0] if single else feats


_TABLES_MAGIC = "qectg-tables v1"


def save_tables(tables: TileTableSet, path) -> None:
    """Plain-text serialization; probabilities written at full precision."""
    lines = [
        _TABLES_MAGIC,
        f"d {tables.d}",
        f"tiles {tables.tile_count}",
        f"alpha {tables.alpha!r}",
        f"digest {tables.dataset_digest}",
    ]
    for t in range(tables.tile_count):
        R, C = tables.origins[t]
        lines.append(f"tile {t} origin {R} {C}")
        for w in range(WORDS):
            lines.append(" ".join(repr(float(v)) for v in tables.probs[t, w]))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_tables(path) -> TileTableSet:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    try:
        if lines[0] != _TABLES_MAGIC:
            raise ValueError(f"unsupported table file header: {lines[0]!r}")
        d = int(lines[1].split()[1])
        tile_count = int(lines[2].split()[1])
        alpha = float(lines[3].split()[1])
        digest = lines[4].split()[1] if len(lines[4].split()) > 1 else ""
        probs = np.empty((tile_count, WORDS, N_CLASSES), dtype=np.float64)
        origins = []
        pos = 5
        for t in range(tile_count):
            tag, idx, _, R, C = lines[pos].split()
            if tag != "tile" or int(idx) != t:
                raise ValueError(f"malformed tile header at line {pos + 1}")
            origins.append((int(R), int(C)))
            block = lines[pos + 1 : pos + 1 + WORDS]
            if len(block) < WORDS:
                raise ValueError("truncated table block")
            probs[t] = [[float(v) for v in row.split()] for row in block]
            pos += 1 + WORDS
    except (IndexError, ValueError) as exc:
        raise ValueError(f"invalid table file {path}: {exc}") from exc
    expected = ((d - 1) // 2) ** 2
    if tile_count != expected:
        raise ValueError(f"table file claims {tile_count} tiles for d={d}, expected {expected}")
    return TileTableSet(
        d=d, origins=tuple(origins), alpha=alpha, probs=probs, counts=None,
        dataset_digest=digest,
    )


class TileFeatureMap(BaseEstimator, TransformerMixin):
    """Syndrome-to-feature transformer backed by fitted tile tables.

    fit takes raw syndromes X of shape (n, d^2-1) and residual class
    labels y in 0..3; transform maps syndromes to (n, 4T) probability
    features.
    """

    def __init__(self, distance: int = 5, smoothing: float = 1.0):
        self.distance = distance
        self.smoothing = smoothing

    def fit(self, X, y, sample_weight=None):
        self.lattice_ = build_lattice(self.distance)
        self.tiles_ = make_tiles(self.lattice_)
        self.tables_ = fit_tables(self.lattice_, X, y, sample_weight, self.smoothing)
        self.n_features_out_ = N_CLASSES * len(self.tiles_)
        return self

    def transform(self, X):
        check_is_fitted(self, "tables_")
        S = as_bit_matrix(X, self.lattice_.check_count, "X")
        return make_features(self.tables_, slice_syndrome_batch(self.tiles_, S))
