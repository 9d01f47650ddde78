"""Exact minimum-weight perfect matching baseline.

Detection events of each kind are paired up (or routed to a virtual
boundary node) so that the total corrected chain length is minimal.  The
event metric is the unit-weight shortest-path distance on the detector
graph, whose edges are data qubits connecting the 1-2 same-kind checks
that contain them.

Matching is exact: instances with up to two events have closed-form
optima; larger ones are solved by an exact blossom implementation
(networkx max-weight matching on complement-transformed weights), never a
heuristic.  Forbidden pairs are absent edges, not large finite weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import networkx as nx
import numpy as np

from .lattice import Lattice, PauliFrame

__all__ = [
    "DetectorGraph",
    "MatchingDecoder",
    "MatchingInstance",
    "build_detector_graph",
    "decode_mwpm",
    "distances",
    "mwpm",
]


@dataclass(eq=False)
class DetectorGraph:
    """Same-kind checks plus one boundary node; one edge per data qubit.

    Node ids are kind-local: 0..k-1 map to ``check_ids``; node k is the
    boundary.  ``dist`` holds all-pairs hop counts and ``path_masks[a][b]``
    the qubit mask of one canonical shortest path (breadth-first tree of
    the lower node id, lowest-id neighbor first).
    """

    kind: str
    check_ids: np.ndarray
    edges: list[tuple[int, int, int]]  # (node_a, node_b, data qubit)
    dist: np.ndarray
    path_masks: np.ndarray  # (k+1, k+1, d^2) uint8

    @property
    def boundary(self) -> int:
        return len(self.check_ids)


def build_detector_graph(lat: Lattice, kind: str) -> DetectorGraph:
    if kind not in ("X", "Z"):
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    check_ids = lat.z_check_ids if kind == "Z" else lat.x_check_ids
    local = {int(g): i for i, g in enumerate(check_ids)}
    k = len(check_ids)
    membership: list[list[int]] = [[] for _ in range(lat.data_count)]
    for gid in check_ids:
        for q in lat.checks[int(gid)].support:
            membership[q].append(local[int(gid)])
    edges: list[tuple[int, int, int]] = []
    for q, nodes in enumerate(membership):
        if len(nodes) == 1:
            edges.append((nodes[0], k, q))
        elif len(nodes) == 2:
            a, b = sorted(nodes)
            edges.append((a, b, q))
        else:  # geometry defect
            raise RuntimeError(f"qubit {q} sits in {len(nodes)} {kind}-kind checks")
    dist, path_masks = _all_pairs_paths(k + 1, edges, lat.data_count)
    return DetectorGraph(kind=kind, check_ids=np.asarray(check_ids), edges=edges,
                         dist=dist, path_masks=path_masks)


def _all_pairs_paths(n_nodes, edges, n_qubits):
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    for a, b, q in edges:
        adj[a].append((b, q))
        adj[b].append((a, q))
    for lst in adj:
        lst.sort()  # lowest-id neighbor first, then lowest qubit, for determinism
    dist = np.full((n_nodes, n_nodes), -1, dtype=np.int64)
    masks = np.zeros((n_nodes, n_nodes, n_qubits), dtype=np.uint8)
    for src in range(n_nodes):
        dist[src, src] = 0
        queue = [src]
        while queue:
            nxt: list[int] = []
            for u in queue:
                for v, q in adj[u]:
                    if dist[src, v] < 0:
                        dist[src, v] = dist[src, u] + 1
                        masks[src, v] = masks[src, u]
                        masks[src, v, q] ^= 1
                        nxt.append(v)
            queue = nxt
    if np.any(dist < 0):
        raise RuntimeError("detector graph is not connected")
    return dist, masks


@dataclass
class MatchingInstance:
    """2m-node metric instance: m events followed by their boundary twins.

    ``weights[i, j]`` is symmetric; ``inf`` marks a forbidden pair (absent
    edge).  ``paths`` maps usable pairs (i < j) to data-qubit masks; the
    zero-weight twin-twin pairs carry no qubits and are omitted.
    """

    weights: np.ndarray
    paths: dict[tuple[int, int], np.ndarray] | None = None

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]


def distances(g: DetectorGraph, events) -> MatchingInstance:
    """Build the matching instance for a set of kind-local event nodes."""
    ev = sorted(int(e) for e in events)
    if any(e < 0 or e >= g.boundary for e in ev):
        raise ValueError("events must be kind-local check nodes")
    m = len(ev)
    w = np.full((2 * m, 2 * m), np.inf)
    paths: dict[tuple[int, int], np.ndarray] = {}
    b = g.boundary
    for i in range(m):
        w[i, m + i] = w[m + i, i] = g.dist[ev[i], b]
        paths[(i, m + i)] = g.path_masks[ev[i], b]
        for j in range(i + 1, m):
            w[i, j] = w[j, i] = g.dist[ev[i], ev[j]]
            paths[(i, j)] = g.path_masks[ev[i], ev[j]]
            w[m + i, m + j] = w[m + j, m + i] = 0.0
    return MatchingInstance(weights=w, paths=paths)


def mwpm(inst: MatchingInstance) -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching of an even-order instance.

    Returns sorted (i, j) pairs with i < j.  Raises ValueError on odd node
    counts and RuntimeError if the finite edges admit no perfect matching.
    """
    n = inst.node_count
    if n % 2:
        raise ValueError(f"perfect matching needs an even node count, got {n}")
    if n == 0:
        return []
    finite = [
        (i, j, inst.weights[i, j])
        for i in range(n)
        for j in range(i + 1, n)
        if np.isfinite(inst.weights[i, j])
    ]
    if not finite:
        raise RuntimeError("matching instance has no usable edges")
    # Maximizing (w_max + 1 - w) over maximum-cardinality matchings
    # minimizes total w over perfect matchings when one exists.
    w_max = max(w for _, _, w in finite)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_weighted_edges_from((i, j, w_max + 1.0 - w) for i, j, w in finite)
    mate = nx.max_weight_matching(graph, maxcardinality=True)
    if 2 * len(mate) != n:
        raise RuntimeError("instance admits no perfect matching")
    return sorted(tuple(sorted(pair)) for pair in mate)


class MatchingDecoder:
    """Per-lattice matching pipeline with precomputed metric tables."""

    kind = "mwpm"

    def __init__(self, lat: Lattice):
        self.lat = lat
        self.graphs = {k: build_detector_graph(lat, k) for k in ("Z", "X")}

    def _correct_kind(self, g: DetectorGraph, fired: np.ndarray) -> np.ndarray:
        """XOR of matched shortest paths for one check kind."""
        out = np.zeros(self.lat.data_count, dtype=np.uint8)
        m = len(fired)
        if m == 0:
            return out
        b = g.boundary
        if m == 1:
            return g.path_masks[fired[0], b].copy()
        if m == 2:
            e0, e1 = int(fired[0]), int(fired[1])
            direct = g.dist[e0, e1]
            via_boundary = g.dist[e0, b] + g.dist[e1, b]
            if direct <= via_boundary:
                return g.path_masks[e0, e1].copy()
            return g.path_masks[e0, b] ^ g.path_masks[e1, b]
        inst = distances(g, fired)
        for i, j in mwpm(inst):
            mask = inst.paths.get((i, j))
            if mask is not None:  # twin-twin pairs carry no correction
                out ^= mask
        return out

    def decode(self, syndrome: np.ndarray) -> PauliFrame:
        s = np.asarray(syndrome, dtype=np.uint8)
        lat = self.lat
        x = self._correct_kind(self.graphs["Z"], np.flatnonzero(s[lat.z_check_ids]))
        z = self._correct_kind(self.graphs["X"], np.flatnonzero(s[lat.x_check_ids]))
        return PauliFrame(x, z)

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = np.asarray(syndromes, dtype=np.uint8)
        xs = np.zeros((len(s), self.lat.data_count), dtype=np.uint8)
        zs = np.zeros_like(xs)
        for i, row in enumerate(s):
            frame = self.decode(row)
            xs[i] = frame.x_bits
            zs[i] = frame.z_bits
        return xs, zs


@lru_cache(maxsize=None)
def _cached_decoder(lat: Lattice) -> MatchingDecoder:
    return MatchingDecoder(lat)


def decode_mwpm(lat: Lattice, syndrome: np.ndarray) -> PauliFrame:
    """Decode one syndrome with the exact matching pipeline."""
    return _cached_decoder(lat).decode(syndrome)
