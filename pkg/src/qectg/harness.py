"""Dataset generation, decoder assembly and Monte Carlo evaluation.

Trial i of an evaluation draws its error from the stream keyed by
(master seed, i), so failure counts are a pure function of (seed, trials)
no matter how work is chunked or how many workers run.  Chunks have a
fixed size so floating-point batch shapes are identical for every worker
count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, LogicalClass, residual_class_bits, syndrome_of_bits
from .matching import MatchingDecoder
from .noise import sample_depolarizing_batch
from .simple import SimpleDecoder, decode_simple_batch
from .validation import check_probability

__all__ = [
    "CSV_HEADER",
    "Dataset",
    "EvalResult",
    "complete_dataset",
    "evaluate",
    "exact_failure_rate",
    "generate_dataset",
    "load_dataset",
    "make_decoder",
    "save_dataset",
    "sweep",
    "wilson_interval",
    "default_workers",
]

DECODER_KINDS = ("simple", "mwpm", "distributed", "gated")
Z999 = 3.2905  # two-sided 99.9% normal quantile
_CHUNK = 1 << 16
WORKERS_ENV = "QECTG_WORKERS"


@dataclass
class Dataset:
    """Training records: error syndromes plus the routed residual class."""

    d: int
    p: float
    seed: int
    syndromes: np.ndarray  # (n, d^2-1) uint8
    classes: np.ndarray  # (n,) uint8, LogicalClass values

    @property
    def n(self) -> int:
        return len(self.syndromes)

    def class_fractions(self) -> np.ndarray:
        return np.bincount(self.classes, minlength=4) / max(self.n, 1)


def generate_dataset(lat: Lattice, p: float, n: int, seed: int) -> Dataset:
    """Sample n records: error syndrome and residual class after routing."""
    check_probability(p)
    if n < 1:
        raise ValueError("dataset size must be >= 1")
    syndromes = np.empty((n, lat.check_count), dtype=np.uint8)
    classes = np.empty(n, dtype=np.uint8)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        keys = np.arange(lo, hi, dtype=np.uint64)
        ex, ez = sample_depolarizing_batch(lat, p, seed, keys)
        s = syndrome_of_bits(lat, ex, ez)
        cx, cz = decode_simple_batch(lat, s)
        syndromes[lo:hi] = s
        classes[lo:hi] = residual_class_bits(lat, ex ^ cx, ez ^ cz)
    return Dataset(d=lat.d, p=float(p), seed=int(seed), syndromes=syndromes, classes=classes)


_DATASET_MAGIC = "qectg-dataset v1"
_CLASS_CHARS = "IXZY"


def save_dataset(ds: Dataset, path) -> None:
    """One record per line: fixed-width hex syndrome (bit 0 = check 0 = LSB)
    followed by the class character."""
    packed = np.packbits(ds.syndromes, axis=1, bitorder="little")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{_DATASET_MAGIC} d={ds.d} p={ds.p!r} n={ds.n} seed={ds.seed}\n")
        for row, c in zip(packed, ds.classes):
            fh.write(f"{row[::-1].tobytes().hex()} {_CLASS_CHARS[c]}\n")


def load_dataset(path) -> Dataset:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split()
        if fields[: len(_DATASET_MAGIC.split())] != _DATASET_MAGIC.split():
            raise ValueError(f"unsupported dataset header: {header!r}")
        meta = dict(f.split("=", 1) for f in fields[2:])
        d = int(meta["d"])
        p = float(meta["p"])
        n = int(meta["n"])
        seed = int(meta["seed"])
        n_checks = d * d - 1
        syndromes = np.zeros((n, n_checks), dtype=np.uint8)
        classes = np.zeros(n, dtype=np.uint8)
        for i in range(n):
            line = fh.readline().split()
            if len(line) != 2:
                raise ValueError(f"dataset file truncated at record {i}")
            packed = np.frombuffer(bytes.fromhex(line[0])[::-1], dtype=np.uint8)
            syndromes[i] = np.unpackbits(packed, bitorder="little")[:n_checks]
            classes[i] = _CLASS_CHARS.index(line[1])
    return Dataset(d=d, p=p, seed=seed, syndromes=syndromes, classes=classes)


def _enumerate_frames(lat: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """All 4^(d^2) Pauli patterns as bit matrices (small lattices only)."""
    n = lat.data_count
    if n > 12:
        raise ValueError("exhaustive enumeration is limited to d=3-scale lattices")
    codes = np.arange(4**n, dtype=np.int64)
    per_qubit = (codes[:, None] >> (2 * np.arange(n))) & 3  # 0=I 1=X 2=Z 3=Y
    x = ((per_qubit == 1) | (per_qubit == 3)).astype(np.uint8)
    z = ((per_qubit == 2) | (per_qubit == 3)).astype(np.uint8)
    return x, z


def _pattern_probabilities(x: np.ndarray, z: np.ndarray, p: float) -> np.ndarray:
    n = x.shape[1]
    weight = (x | z).sum(axis=1)
    return (1 - p) ** (n - weight) * (p / 3.0) ** weight


def complete_dataset(lat: Lattice, p: float):
    """Exhaustive weighted dataset over every error pattern (d=3 scale).

    Returns (syndromes, classes, weights) aggregated over identical
    (syndrome, class) pairs.  Weights are exact pattern probabilities at
    error rate p, scaled to a nominal sample of one draw per pattern so
    they behave like counts under Laplace smoothing.  This realizes the
    complete-training-set regime in which the 256-row tables are exact.
    """
    check_probability(p)
    ex, ez = _enumerate_frames(lat)
    s = syndrome_of_bits(lat, ex, ez)
    cx, cz = decode_simple_batch(lat, s)
    cls = residual_class_bits(lat, ex ^ cx, ez ^ cz)
    w = _pattern_probabilities(ex, ez, p) * float(4 ** lat.data_count)
    key = (s.astype(np.int64) @ (1 << np.arange(lat.check_count, dtype=np.int64))) * 4 + cls
    uniq, inverse = np.unique(key, return_inverse=True)
    agg = np.bincount(inverse, weights=w)
    syndromes = ((uniq[:, None] // 4) >> np.arange(lat.check_count)) & 1
    return syndromes.astype(np.uint8), (uniq % 4).astype(np.uint8), agg


def exact_failure_rate(lat: Lattice, p: float, decoder) -> float:
    """Exact logical error rate by summing all pattern probabilities.

    Decodes each distinct syndrome once; independent of any sampling.
    """
    check_probability(p)
    ex, ez = _enumerate_frames(lat)
    s = syndrome_of_bits(lat, ex, ez)
    key = s.astype(np.int64) @ (1 << np.arange(lat.check_count, dtype=np.int64))
    uniq, inverse = np.unique(key, return_inverse=True)
    distinct = ((uniq[:, None]) >> np.arange(lat.check_count)) & 1
    cx, cz = decoder.decode_batch(distinct.astype(np.uint8))
    cls = residual_class_bits(lat, ex ^ cx[inverse], ez ^ cz[inverse])
    w = _pattern_probabilities(ex, ez, p)
    return float(w[cls != LogicalClass.I].sum())


def wilson_interval(failures: int, trials: int, z: float = Z999) -> tuple[float, float]:
    """Wilson score interval; well behaved at zero and small counts."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = failures / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # rounding must never push the interval off the point estimate
    return max(min(center - half, phat), 0.0), min(max(center + half, phat), 1.0)


@dataclass
class EvalResult:
    decoder: str
    d: int
    p: float
    trials: int
    failures: int
    ler: float
    ci_low: float
    ci_high: float
    seed: int
    wall_time_s: float


def make_decoder(kind: str, lat: Lattice, models: dict | None = None):
    """Build a decoder object for a kind tag; trained kinds need models."""
    if kind == "simple":
        return SimpleDecoder(lat)
    if kind == "mwpm":
        return MatchingDecoder(lat)
    if kind in ("distributed", "gated"):
        if not models or kind not in models:
            raise ValueError(f"decoder kind {kind!r} requires trained models")
        return models[kind]
    raise ValueError(f"unknown decoder kind {kind!r}")


def _eval_chunk(decoder, lat: Lattice, p: float, seed: int, lo: int, hi: int) -> int:
    keys = np.arange(lo, hi, dtype=np.uint64)
    ex, ez = sample_depolarizing_batch(lat, p, seed, keys)
    s = syndrome_of_bits(lat, ex, ez)
    if getattr(decoder, "kind", None) == "oracle":
        cx, cz = ex, ez  # self-test hook: perfect corrections
    else:
        cx, cz = decoder.decode_batch(s)
    if __debug__:
        rep = syndrome_of_bits(lat, cx, cz)
        assert np.array_equal(rep, s), "decoder output does not reproduce the syndrome"
    cls = residual_class_bits(lat, ex ^ cx, ez ^ cz)
    return int(np.count_nonzero(cls != LogicalClass.I))


class _OracleDecoder:
    """Evaluation self-test: 'corrections' equal the sampled errors."""

    kind = "oracle"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def evaluate(
    decoder,
    lat: Lattice,
    p: float,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> EvalResult:
    """Monte Carlo logical error rate with a 99.9% Wilson interval.

    ``decoder`` is a decoder object or a kind tag from
    {'simple', 'mwpm', 'oracle'} (trained kinds must come as objects).
    Results are identical for any worker count.
    """
    check_probability(p)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(decoder, str):
        decoder = _OracleDecoder() if decoder == "oracle" else make_decoder(decoder, lat)
    workers = default_workers() if workers is None else max(1, int(workers))
    bounds = [(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]
    start = time.perf_counter()
    if workers == 1 or len(bounds) == 1:
        failures = sum(_eval_chunk(decoder, lat, p, seed, lo, hi) for lo, hi in bounds)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_eval_chunk, decoder, lat, p, seed, lo, hi)
                for lo, hi in bounds
            ]
            failures = sum(f.result() for f in futures)
    wall = time.perf_counter() - start
    ci_low, ci_high = wilson_interval(failures, trials)
    return EvalResult(
        decoder=getattr(decoder, "kind", type(decoder).__name__),
        d=lat.d,
        p=float(p),
        trials=trials,
        failures=failures,
        ler=failures / trials,
        ci_low=ci_low,
        ci_high=ci_high,
        seed=int(seed),
        wall_time_s=wall,
    )


CSV_HEADER = "decoder,d,p,trials,failures,ler,ci_low,ci_high,seed,wall_time_s"


def _csv_row(r: EvalResult) -> str:
    return (
        f"{r.decoder},{r.d},{r.p!r},{r.trials},{r.failures},{r.ler!r},"
        f"{r.ci_low!r},{r.ci_high!r},{r.seed},{r.wall_time_s:.3f}"
    )


def sweep(
    decoders,
    lat: Lattice,
    p_grid,
    trials: int,
    seed: int,
    csv_path,
    models: dict | None = None,
    workers: int | None = None,
) -> list[EvalResult]:
    """Evaluate each decoder over the grid and write one CSV data row per
    (decoder, p); deterministic per seed apart from wall_time_s."""
    results = []
    rows = [CSV_HEADER]
    for kind in decoders:
        decoder = make_decoder(kind, lat, models) if isinstance(kind, str) else kind
        for p in p_grid:
            res = evaluate(decoder, lat, p, trials, seed, workers)
            results.append(res)
            rows.append(_csv_row(res))
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(rows) + "\n")
    return results
