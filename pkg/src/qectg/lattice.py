"""Rotated surface code geometry, Pauli frames, syndromes and logical classes.

The code lives on a d x d grid of data qubits (d odd), indexed row-major:
qubit (r, c) -> r*d + c.  Parity checks sit on plaquette coordinates
(pr, pc) with pr, pc in -1..d-1:

* bulk plaquettes (pr, pc in 0..d-2) touch the four corner qubits and are
  Z-kind when pr+pc is even, X-kind otherwise;
* weight-2 boundary checks: top row (pr=-1, X-kind, even pc), bottom row
  (pr=d-1, X-kind, odd pc), left column (pc=-1, Z-kind, odd pr), right
  column (pc=d-1, Z-kind, even pr).

With this layout every Z-kind check sits on an even-parity plaquette
coordinate and every X-kind check on an odd-parity one.  Check ids are
dense: Z-kind checks first in plaquette row-major order, then X-kind.

The vertical column of qubits on the left edge supports the logical X
operator; the bottom row supports the logical Z operator.  They overlap in
exactly one qubit (the bottom-left corner), so they anticommute.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Check",
    "Lattice",
    "LogicalClass",
    "PauliFrame",
    "build_lattice",
    "compose",
    "residual_class",
    "residual_class_bits",
    "syndrome_of",
    "syndrome_of_bits",
]


class LogicalClass(enum.IntEnum):
    """Action of a syndrome-free Pauli frame on the encoded qubit."""

    I = 0
    X = 1
    Z = 2
    Y = 3

    @staticmethod
    def from_parities(cx: int, cz: int) -> "LogicalClass":
        """Map the (anticommutes-with-logical-Z, -with-logical-X) parity pair."""
        return LogicalClass(int(cx) + 2 * int(cz))

    @property
    def char(self) -> str:
        return self.name


@dataclass(frozen=True)
class Check:
    """One parity check: dense id, kind tag, data-qubit support, plaquette."""

    id: int
    kind: str  # "X" or "Z"
    support: frozenset[int]
    plaquette: tuple[int, int]


@dataclass(eq=False)
class Lattice:
    """Immutable rotated surface code geometry plus derived bit matrices.

    ``detects_x[i]`` is the support mask of check ``i`` when it is Z-kind
    (fires on X components) and all-zero otherwise; ``detects_z`` is the
    X-kind counterpart.  Hashing is by identity so lattices can key caches.
    """

    d: int
    data_count: int
    checks: tuple[Check, ...]
    logical_x_support: frozenset[int]
    logical_z_support: frozenset[int]
    plaquette_index: dict[tuple[int, int], int]
    z_check_ids: np.ndarray = field(repr=False)
    x_check_ids: np.ndarray = field(repr=False)
    detects_x: np.ndarray = field(repr=False)
    detects_z: np.ndarray = field(repr=False)
    logical_x_mask: np.ndarray = field(repr=False)
    logical_z_mask: np.ndarray = field(repr=False)

    @property
    def check_count(self) -> int:
        return len(self.checks)

    def qubit_index(self, r: int, c: int) -> int:
        return r * self.d + c


@dataclass
class PauliFrame:
    """Pauli operator on the data qubits, phases ignored.

    ``x_bits[q]``/``z_bits[q]`` flag an X/Z component on qubit q; both set
    means Y.  Composition is bitwise XOR on both vectors.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray

    def __post_init__(self) -> None:
        self.x_bits = np.asarray(self.x_bits, dtype=np.uint8)
        self.z_bits = np.asarray(self.z_bits, dtype=np.uint8)
        if self.x_bits.shape != self.z_bits.shape or self.x_bits.ndim != 1:
            raise ValueError("x_bits and z_bits must be 1-d vectors of equal length")

    @staticmethod
    def identity(n: int) -> "PauliFrame":
        return PauliFrame(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @staticmethod
    def from_supports(n: int, x_support=(), z_support=()) -> "PauliFrame":
        f = PauliFrame.identity(n)
        f.x_bits[list(x_support)] = 1
        f.z_bits[list(z_support)] = 1
        return f

    def __xor__(self, other: "PauliFrame") -> "PauliFrame":
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliFrame):
            return NotImplemented
        return bool(
            np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )

    def weight(self) -> int:
        """Number of qubits carrying a non-identity component."""
        return int(np.count_nonzero(self.x_bits | self.z_bits))


def build_lattice(d: int) -> Lattice:
    """Construct the distance-d rotated surface code.

    Raises ValueError for even or too-small d; raises RuntimeError if the
    generated geometry violates its own invariants (a program defect).
    """
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise ValueError(f"distance must be an integer, got {d!r}")
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be odd and >= 3, got {d}")
    d = int(d)
    n = d * d

    def qi(r: int, c: int) -> int:
        return r * d + c

    entries: dict[str, list[tuple[tuple[int, int], frozenset[int]]]] = {"Z": [], "X": []}
    for pr in range(d - 1):
        for pc in range(d - 1):
            support = frozenset(
                {qi(pr, pc), qi(pr, pc + 1), qi(pr + 1, pc), qi(pr + 1, pc + 1)}
            )
            kind = "Z" if (pr + pc) % 2 == 0 else "X"
            entries[kind].append(((pr, pc), support))
    for pc in range(0, d - 1, 2):  # top boundary, X-kind
        entries["X"].append(((-1, pc), frozenset({qi(0, pc), qi(0, pc + 1)})))
    for pc in range(1, d - 1, 2):  # bottom boundary, X-kind
        entries["X"].append(((d - 1, pc), frozenset({qi(d - 1, pc), qi(d - 1, pc + 1)})))
    for pr in range(1, d - 1, 2):  # left boundary, Z-kind
        entries["Z"].append(((pr, -1), frozenset({qi(pr, 0), qi(pr + 1, 0)})))
    for pr in range(0, d - 1, 2):  # right boundary, Z-kind
        entries["Z"].append(((pr, d - 1), frozenset({qi(pr, d - 1), qi(pr + 1, d - 1)})))

    checks: list[Check] = []
    for kind in ("Z", "X"):
        for plaq, support in sorted(entries[kind], key=lambda e: e[0]):
            checks.append(Check(id=len(checks), kind=kind, support=support, plaquette=plaq))

    logical_x = frozenset(qi(r, 0) for r in range(d))
    logical_z = frozenset(qi(d - 1, c) for c in range(d))

    z_ids = np.array([c.id for c in checks if c.kind == "Z"], dtype=np.int64)
    x_ids = np.array([c.id for c in checks if c.kind == "X"], dtype=np.int64)
    detects_x = np.zeros((len(checks), n), dtype=np.uint8)
    detects_z = np.zeros((len(checks), n), dtype=np.uint8)
    for c in checks:
        target = detects_x if c.kind == "Z" else detects_z
        target[c.id, list(c.support)] = 1
    lx_mask = np.zeros(n, dtype=np.uint8)
    lx_mask[list(logical_x)] = 1
    lz_mask = np.zeros(n, dtype=np.uint8)
    lz_mask[list(logical_z)] = 1

    lat = Lattice(
        d=d,
        data_count=n,
        checks=tuple(checks),
        logical_x_support=logical_x,
        logical_z_support=logical_z,
        plaquette_index={c.plaquette: c.id for c in checks},
        z_check_ids=z_ids,
        x_check_ids=x_ids,
        detects_x=detects_x,
        detects_z=detects_z,
        logical_x_mask=lx_mask,
        logical_z_mask=lz_mask,
    )
    _validate(lat)
    return lat


def _validate(lat: Lattice) -> None:
    """Fail fast on geometry defects; every condition is structural."""
    d = lat.d
    if len(lat.checks) != d * d - 1:
        raise RuntimeError("check count mismatch")
    if len(lat.z_check_ids) != (d * d - 1) // 2 or len(lat.x_check_ids) != (d * d - 1) // 2:
        raise RuntimeError("kind balance mismatch")
    for c in lat.checks:
        if len(c.support) not in (2, 4):
            raise RuntimeError(f"check {c.id} has support size {len(c.support)}")
        pr, pc = c.plaquette
        if len(c.support) == 2 and pr not in (-1, d - 1) and pc not in (-1, d - 1):
            raise RuntimeError(f"weight-2 check {c.id} not on a boundary plaquette")
    # All X-kind supports must overlap all Z-kind supports evenly.
    overlap = lat.detects_x.astype(np.int64) @ lat.detects_z.astype(np.int64).T
    if np.any(overlap % 2):
        raise RuntimeError("anticommuting check pair")
    # Logical operators commute with every check of the opposite kind...
    if np.any((lat.detects_x @ lat.logical_x_mask.astype(np.int64)) % 2):
        raise RuntimeError("logical X anticommutes with a Z-kind check")
    if np.any((lat.detects_z @ lat.logical_z_mask.astype(np.int64)) % 2):
        raise RuntimeError("logical Z anticommutes with an X-kind check")
    # ...and with each other they anticommute (odd overlap).
    if int(lat.logical_x_mask @ lat.logical_z_mask) % 2 != 1:
        raise RuntimeError("logical operators do not anticommute")
    if len(lat.logical_x_support) != d or len(lat.logical_z_support) != d:
        raise RuntimeError("logical support size mismatch")


def _check_frame(lat: Lattice, frame: PauliFrame) -> None:
    if len(frame.x_bits) != lat.data_count:
        raise ValueError(
            f"frame length {len(frame.x_bits)} does not match lattice ({lat.data_count})"
        )


def syndrome_of(lat: Lattice, frame: PauliFrame) -> np.ndarray:
    """One noiseless extraction round: bit i fires iff check i anticommutes."""
    _check_frame(lat, frame)
    return syndrome_of_bits(lat, frame.x_bits[None, :], frame.z_bits[None, :])[0]


def syndrome_of_bits(lat: Lattice, x_bits: np.ndarray, z_bits: np.ndarray) -> np.ndarray:
    """Batch syndrome extraction on (n, d^2) bit matrices -> (n, d^2-1)."""
    s = x_bits.astype(np.uint8) @ lat.detects_x.T + z_bits.astype(np.uint8) @ lat.detects_z.T
    return (s & 1).astype(np.uint8)


def compose(a: PauliFrame, b: PauliFrame) -> PauliFrame:
    """Pauli group product up to phase: XOR of both component vectors."""
    if len(a.x_bits) != len(b.x_bits):
        raise ValueError("cannot compose frames of different lengths")
    return PauliFrame(a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits)


def residual_class(lat: Lattice, frame: PauliFrame) -> LogicalClass:
    """Logical action of a syndrome-free frame.

    Rejects frames with a nontrivial syndrome: their logical action is not
    defined.
    """
    _check_frame(lat, frame)
    if np.any(syndrome_of(lat, frame)):
        raise ValueError("residual_class requires a frame with all-zero syndrome")
    return LogicalClass(
        int(residual_class_bits(lat, frame.x_bits[None, :], frame.z_bits[None, :])[0])
    )


def residual_class_bits(lat: Lattice, x_bits: np.ndarray, z_bits: np.ndarray) -> np.ndarray:
    """Batch logical classes for (n, d^2) bit matrices; no syndrome check."""
    cx = (x_bits.astype(np.uint8) @ lat.logical_z_mask) & 1
    cz = (z_bits.astype(np.uint8) @ lat.logical_x_mask) & 1
    return (cx + 2 * cz).astype(np.uint8)
