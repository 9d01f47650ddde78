import numpy as np
import pytest
from oracles import brute_force_min_perfect_matching, count_perfect_matchings

from qectg.lattice import PauliFrame, residual_class_bits, syndrome_of_bits
from qectg.matching import (
    MatchingDecoder,
    MatchingInstance,
    build_detector_graph,
    decode_mwpm,
    distances,
    mwpm,
)
from qectg.noise import sample_depolarizing_batch


def _graph(lat, kind):
    return build_detector_graph(lat, kind)


def test_d3_z_graph_structure(lat3):
    g = _graph(lat3, "Z")
    assert g.boundary == 4  # 4 Z checks, boundary node is id 4
    assert len(g.edges) == 9


def test_qubit4_connects_the_two_bulk_z_checks(lat3):
    g = _graph(lat3, "Z")
    (edge,) = [e for e in g.edges if e[2] == 4]
    supports = [lat3.checks[int(g.check_ids[n])].support for n in edge[:2]]
    assert {frozenset(s) for s in supports} == {frozenset({0, 1, 3, 4}), frozenset({4, 5, 7, 8})}


def test_qubit2_is_a_boundary_edge(lat3):
    g = _graph(lat3, "Z")
    (edge,) = [e for e in g.edges if e[2] == 2]
    assert g.boundary in edge[:2]


@pytest.mark.parametrize("d", [3, 5, 7, 9])
@pytest.mark.parametrize("kind", ["Z", "X"])
def test_graph_invariants(lattices, d, kind):
    lat = lattices[d]
    g = _graph(lat, kind)
    assert len(g.edges) == lat.data_count  # each qubit exactly once per kind
    qubits = sorted(e[2] for e in g.edges)
    assert qubits == list(range(lat.data_count))


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_boundary_distance_matches_closed_form(lattices, d):
    lat = lattices[d]
    for kind in ("Z", "X"):
        g = _graph(lat, kind)
        for node, gid in enumerate(g.check_ids):
            pr, pc = lat.checks[int(gid)].plaquette
            want = min(pr + 1, d - 1 - pr) if kind == "Z" else min(pc + 1, d - 1 - pc)
            assert g.dist[node, g.boundary] == want


def test_adjacent_bulk_checks_at_distance_one(lat3):
    g = _graph(lat3, "Z")
    locs = {int(gid): n for n, gid in enumerate(g.check_ids)}
    bulk = [c.id for c in lat3.checks if c.kind == "Z" and len(c.support) == 4]
    a, b = (locs[i] for i in bulk)
    assert g.dist[a, b] == 1


def test_distances_zero_events_gives_empty_instance(lat3):
    inst = distances(_graph(lat3, "Z"), [])
    assert inst.node_count == 0
    assert mwpm(inst) == []


def test_distances_metric_properties(lat5, rng):
    for kind in ("Z", "X"):
        g = _graph(lat5, kind)
        k = g.boundary
        assert np.array_equal(g.dist, g.dist.T)
        for _ in range(200):
            a, b, c = rng.integers(0, k + 1, size=3)
            assert g.dist[a, c] <= g.dist[a, b] + g.dist[b, c]


def test_single_event_pairs_with_its_twin(lat3):
    g = _graph(lat3, "Z")
    inst = distances(g, [0])
    assert mwpm(inst) == [(0, 1)]


def test_two_close_events_pair_directly():
    # events at distance 1, each 2 from the boundary: direct pairing wins
    w = np.full((4, 4), np.inf)
    w[0, 1] = w[1, 0] = 1.0
    w[0, 2] = w[2, 0] = 2.0
    w[1, 3] = w[3, 1] = 2.0
    w[2, 3] = w[3, 2] = 0.0
    assert mwpm(MatchingInstance(weights=w)) == [(0, 1), (2, 3)]


def test_mwpm_rejects_odd_instances():
    with pytest.raises(ValueError):
        mwpm(MatchingInstance(weights=np.zeros((3, 3))))


def test_mwpm_matches_brute_force_on_random_graphs(rng):
    for _ in range(200):
        n = int(rng.choice([4, 6, 8, 10]))
        w = np.zeros((n, n))
        upper = rng.integers(0, 21, size=(n, n)).astype(float)
        w = np.triu(upper, 1)
        w = w + w.T
        np.fill_diagonal(w, np.inf)
        inst = MatchingInstance(weights=w)
        pairs = mwpm(inst)
        total = sum(w[i, j] for i, j in pairs)
        assert total == brute_force_min_perfect_matching(w)


def test_matching_count_formula():
    assert count_perfect_matchings(12) == 10395


def test_decode_empty_syndrome(lat3):
    assert decode_mwpm(lat3, np.zeros(8, np.uint8)) == PauliFrame.identity(9)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_decode_reproduces_noise_syndromes(lattices, d):
    lat = lattices[d]
    keys = np.arange(2000, dtype=np.uint64)
    ex, ez = sample_depolarizing_batch(lat, 0.12, 51, keys)
    S = syndrome_of_bits(lat, ex, ez)
    dec = MatchingDecoder(lat)
    cx, cz = dec.decode_batch(S)
    assert np.array_equal(syndrome_of_bits(lat, cx, cz), S)


def test_weight_one_errors_all_corrected_at_d3(lat3):
    dec = MatchingDecoder(lat3)
    for q in range(9):
        for px, pz in ((1, 0), (0, 1), (1, 1)):
            x = np.zeros((1, 9), np.uint8)
            z = np.zeros((1, 9), np.uint8)
            x[0, q], z[0, q] = px, pz
            s = syndrome_of_bits(lat3, x, z)
            cx, cz = dec.decode_batch(s)
            assert residual_class_bits(lat3, x ^ cx, z ^ cz)[0] == 0


def test_decode_is_deterministic(lat5, rng):
    dec = MatchingDecoder(lat5)
    ex, ez = sample_depolarizing_batch(lat5, 0.15, 99, np.arange(50, dtype=np.uint64))
    S = syndrome_of_bits(lat5, ex, ez)
    a = dec.decode_batch(S)
    b = dec.decode_batch(S)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
