import itertools
import json
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from congest_shortcuts.audit import measure, part_subgraph
from congest_shortcuts.errors import InvalidArgument, PreconditionViolated
from congest_shortcuts.graph import Graph, bfs_distances, closed_neighborhood, diameter
from congest_shortcuts.instances import (Partition, gen_diameter_d_graph, gen_k_chordal,
                                         gen_random_connected_partition, singleton_partition)
from congest_shortcuts.shortcuts import (KwiseHash, Shortcut, ShortcutConfig, build_shortcut_d3, build_shortcut_d4,
                                         d4_hash_for, harmonic, hash_degree, hash_range, identify_large_parts,
                                         kappa, kwise_hash_eval, next_prime, one_hop_extension, step2_congestion)


@pytest.fixture(scope="module")
def d3_graph():
    return gen_diameter_d_graph(64, 3, seed=5)


@pytest.fixture(scope="module")
def d4_graph():
    return gen_diameter_d_graph(64, 4, seed=5)


def test_kappa():
    assert kappa(3, 16) == pytest.approx(2)
    assert kappa(4, 4096) == pytest.approx(16)
    for n in (1, 7, 1000):
        assert kappa(3, n) ** 4 == pytest.approx(n)
    with pytest.raises(InvalidArgument):
        kappa(5, 10)


def test_one_hop_path(path5):
    parts = Partition.from_sets(5, [[0, 1], [3, 4]])
    sc = one_hop_extension(path5, parts)
    assert sc.per_part == (frozenset({(0, 1), (1, 2)}), frozenset({(2, 3), (3, 4)}))
    assert sc.provenance(0, (1, 2)) == "STEP1"
    assert measure(path5, parts, sc).congestion == 1


def test_one_hop_single_part(path5):
    parts = Partition.from_sets(5, [range(5)])
    assert set(measure(path5, parts, one_hop_extension(path5, parts)).per_edge_congestion.values()) == {1}


def test_one_hop_triangle(triangle):
    rep = measure(triangle, singleton_partition(3), one_hop_extension(triangle, singleton_partition(3)))
    assert rep.congestion == 2
    assert set(rep.per_edge_congestion.values()) == {2}


@given(st.integers(2, 40), st.integers(0, 80), st.integers(0, 10 ** 6), st.data())
def test_one_hop_congestion_at_most_two(n, extra, seed, data):
    from conftest import random_connected_graph
    g = random_connected_graph(n, extra, seed)
    parts = gen_random_connected_partition(g, data.draw(st.integers(1, n)), seed)
    assert measure(g, parts, one_hop_extension(g, parts)).congestion <= 2


@pytest.mark.parametrize("k,x,N,num_parts", [(4, 3, 6, 5), (4, 6, 5, 3), (6, 4, 5, 4), (8, 5, 4, 6), (6, 2, 8, 1)])
def test_one_hop_kchordal_dilation(k, x, N, num_parts):
    inst = gen_k_chordal(k, x, N)
    D = diameter(inst.graph)
    for seed in range(5):
        parts = gen_random_connected_partition(inst.graph, num_parts, seed)
        rep = measure(inst.graph, parts, one_hop_extension(inst.graph, parts))
        assert rep.dilation <= k * D + 2


def test_identify_large():
    path = Graph(64, [(i, i + 1) for i in range(63)])
    cfg = ShortcutConfig(large_threshold_override=10)
    assert identify_large_parts(path, singleton_partition(64), 3, cfg) == set()
    assert identify_large_parts(path, Partition.from_sets(64, [range(64)]), 3, cfg) == {0}
    big = ShortcutConfig(large_threshold_override=64)
    assert identify_large_parts(path, Partition.from_sets(64, [range(64)]), 3, big) == set()


def test_config_validation():
    for kwargs in ({"large_threshold_override": -1}, {"hash_degree_cap": 0}, {"hash_range_override": 0}):
        with pytest.raises(InvalidArgument):
            ShortcutConfig(**kwargs)


def test_hash_parameters():
    cfg = ShortcutConfig()
    assert hash_range(64, cfg) == 2
    assert hash_range(2 ** 30, cfg) == math.floor(2 ** 10 / 30)
    assert hash_degree(64, cfg) == 512
    assert hash_degree(2, cfg) == 2
    assert next_prime(14) == 17 and next_prime(2) == 2


def test_d3_no_large_parts(d3_graph):
    parts = gen_random_connected_partition(d3_graph, 6, 1)
    sc = build_shortcut_d3(d3_graph, parts, ShortcutConfig(seed=3))
    assert sc == Shortcut.empty(6)


def test_d3_requires_diameter(d4_graph):
    parts = singleton_partition(64)
    with pytest.raises(PreconditionViolated):
        build_shortcut_d3(d4_graph, parts)
    with pytest.warns(RuntimeWarning):
        build_shortcut_d3(d4_graph, parts, ShortcutConfig(strict_diameter=False))


def test_d3_deterministic():
    g = gen_diameter_d_graph(256, 3, seed=11)
    parts = gen_random_connected_partition(g, 4, 2)
    cfg = ShortcutConfig(seed=77)
    a = build_shortcut_d3(g, parts, cfg, large=range(4))
    b = build_shortcut_d3(g, parts, cfg, large=range(4))
    assert a == b and a.to_json() == b.to_json()
    assert a != build_shortcut_d3(g, parts, ShortcutConfig(seed=78), large=range(4))


def test_d4_deterministic(d4_graph):
    parts = gen_random_connected_partition(d4_graph, 5, 2)
    cfg = ShortcutConfig(seed=9)
    assert build_shortcut_d4(d4_graph, parts, cfg, large=range(5)) == \
        build_shortcut_d4(d4_graph, parts, cfg, large=range(5))


def test_d4_unit_range_includes_every_eligible_edge(d4_graph):
    parts = gen_random_connected_partition(d4_graph, 4, 3)
    sc = build_shortcut_d4(d4_graph, parts, ShortcutConfig(seed=1, hash_range_override=1), large=range(4))
    for i, p in enumerate(parts):
        closed = closed_neighborhood(d4_graph, p)
        expected = {e for e in d4_graph.edges if e[0] in closed or e[1] in closed}
        assert sc.step2[i] == expected


@pytest.mark.parametrize("builder,gname", [(build_shortcut_d3, "d3_graph"), (build_shortcut_d4, "d4_graph")])
def test_step2_edges_touch_closed_neighborhood(builder, gname, request):
    g = request.getfixturevalue(gname)
    parts = gen_random_connected_partition(g, 8, 4)
    for seed in range(5):
        sc = builder(g, parts, ShortcutConfig(seed=seed), large=range(8))
        for i, p in enumerate(parts):
            closed = closed_neighborhood(g, p)
            assert all(u in closed or v in closed for u, v in sc.step2[i])
            assert sc.step1[i] == frozenset(e for e in g.edges if e[0] in p or e[1] in p)
        sc.validate(g)


def part_spread(g, part, h_edges):
    """Largest distance between two part nodes inside P_i + H_i."""
    nodes, edges = part_subgraph(g, part, h_edges)
    sub = Graph(g.n, edges)
    far = 0
    for v in part:
        dist = bfs_distances(sub, v, allowed=nodes)
        far = max(far, max(dist[u] for u in part))
    return far


@pytest.mark.parametrize("builder,gname", [(build_shortcut_d3, "d3_graph"), (build_shortcut_d4, "d4_graph")])
def test_dilation_monotone(builder, gname, request):
    # measured between part nodes: pendant shortcut nodes may stretch the full diameter
    g = request.getfixturevalue(gname)
    parts = gen_random_connected_partition(g, 4, 8)
    for seed in range(4):
        sc = builder(g, parts, ShortcutConfig(seed=seed), large=range(4))
        for i, p in enumerate(parts):
            d0 = diameter(g, p)
            d1 = part_spread(g, p, sc.step1[i])
            d2 = part_spread(g, p, sc.per_part[i])
            assert d2 <= d1 <= d0


def test_d3_expected_congestion_monte_carlo(d3_graph):
    g = d3_graph
    parts = gen_random_connected_partition(g, 6, 1)
    large = range(6)
    q = 1 / math.sqrt(g.n)
    closed = [closed_neighborhood(g, p) for p in parts]
    # exact mean: each endpoint in N+(P_i) flips its own coin for the edge
    expect = {e: sum(1 - (1 - q) ** ((e[0] in c) + (e[1] in c)) for c in closed) for e in g.edges}
    trials = 1000
    total = Counter()
    for seed in range(trials):
        total.update(step2_congestion(build_shortcut_d3(g, parts, ShortcutConfig(seed=seed), large=large)))
    bound = 2 * len(parts) / math.sqrt(g.n)
    for e, mu in expect.items():
        assert mu <= bound + 1e-12
        var = sum((1 - (1 - q) ** ((e[0] in c) + (e[1] in c))) * (1 - q) ** ((e[0] in c) + (e[1] in c))
                  for c in closed)
        sigma = math.sqrt(var / trials)
        # 4.5 sigma per edge keeps the family-wise false alarm rate negligible
        assert abs(total[e] / trials - mu) <= 4.5 * sigma + 1e-9


def test_d4_inclusion_rate_monte_carlo():
    g = gen_diameter_d_graph(30, 4, seed=2)
    parts = gen_random_connected_partition(g, 3, 5)
    closed = closed_neighborhood(g, parts[0])
    # edge (u, v) with only v in N+(P_0): included iff the single coin u->v fires
    u, v = next((a, b) for a, b in itertools.chain(g.edges, ((b, a) for a, b in g.edges))
                if a not in closed and b in closed)
    e = (min(u, v), max(u, v))
    Y = 5
    trials = 10000
    hits = 0
    for seed in range(trials):
        cfg = ShortcutConfig(seed=seed, hash_range_override=Y, hash_degree_cap=4)
        hits += e in build_shortcut_d4(g, parts, cfg, large=[0]).step2[0]
    expected = harmonic(Y) / Y
    sigma = math.sqrt(expected * (1 - expected) / trials)
    assert abs(hits / trials - expected) <= 3 * sigma


# --- hashing ------------------------------------------------------------------------

def test_constant_hash():
    h = KwiseHash.from_coefficients([3], 10, 4, 11)
    assert {h(k) for k in range(10)} == {4}


def test_hash_domain_checks():
    h = KwiseHash.from_seed(7, 2, 10, 4)
    with pytest.raises(InvalidArgument):
        kwise_hash_eval(h, 10)
    with pytest.raises(InvalidArgument):
        h.eval_many([0, -1])
    with pytest.raises(InvalidArgument):
        KwiseHash.from_coefficients([1], 10, 4, 9)
    with pytest.raises(InvalidArgument):
        KwiseHash.from_coefficients([1], 20, 4, 11)
    with pytest.raises(InvalidArgument):
        KwiseHash.from_seed(11 ** 2, 2, 10, 4, prime=11)


def test_hash_seed_roundtrip():
    h = KwiseHash.from_seed(123456, 5, 50, 7)
    assert h.prime == 53
    assert KwiseHash.from_seed(h.seed, 5, 50, 7) == h
    assert h.seed_bits == (53 ** 5 - 1).bit_length()
    assert h.eval_many(range(50)).tolist() == [h(k) for k in range(50)]


def test_pairwise_uniform_prime5():
    pairs = Counter()
    for seed in range(25):
        h = KwiseHash.from_seed(seed, 2, 5, 5, prime=5)
        pairs[(h(0), h(1))] += 1
    assert len(pairs) == 25 and set(pairs.values()) == {1}


@pytest.mark.parametrize("t,p", [(2, 7), (2, 11), (3, 5), (3, 7), (2, 13), (3, 13)])
def test_exact_t_wise_independence(t, p):
    for keys in itertools.combinations(range(p), t):
        if keys[0] > 2:
            break
        counts = Counter()
        for seed in range(p ** t):
            h = KwiseHash.from_seed(seed, t, p, p, prime=p)
            counts[tuple(h(k) for k in keys)] += 1
        assert len(counts) == p ** t and set(counts.values()) == {1}


def test_large_prime_fallback():
    h = KwiseHash.from_seed(2 ** 40 + 3, 2, 2 ** 31 + 10, 3)
    assert h.prime > 2 ** 31
    keys = np.array([0, 5, 2 ** 31 + 2])
    assert h.eval_many(keys).tolist() == [h(int(k)) for k in keys]


def test_d4_hash_shared_and_seeded(d4_graph):
    a = d4_hash_for(d4_graph, 3, ShortcutConfig(seed=4))
    assert a == d4_hash_for(d4_graph, 3, ShortcutConfig(seed=4))
    assert a.domain_size == 3 * 64 and a.range_size == 2 and a.t == 512


# --- shortcut container -----------------------------------------------------------

def test_shortcut_json_roundtrip(d3_graph):
    parts = gen_random_connected_partition(d3_graph, 3, 1)
    sc = build_shortcut_d3(d3_graph, parts, ShortcutConfig(seed=5), large=[0, 2])
    doc = json.loads(sc.to_json())
    assert doc["version"] == 1 and len(doc["parts"]) == 3
    back = Shortcut.from_json(sc.to_json())
    assert back.per_part == sc.per_part
    for i, edges in enumerate(sc.per_part):
        assert all(back.provenance(i, e) == sc.provenance(i, e) for e in edges)
    assert back.to_json() == sc.to_json()


@pytest.mark.parametrize("text", ["{}", "[]", '{"version": 2, "parts": []}',
                                  '{"version": 1, "parts": [[[0, 1, "STEP9"]]]}', "nope"])
def test_shortcut_json_errors(text):
    with pytest.raises(InvalidArgument):
        Shortcut.from_json(text)


def test_shortcut_validate_rejects_foreign_edges(path5):
    with pytest.raises(InvalidArgument):
        Shortcut.from_edge_sets([[(0, 2)]]).validate(path5)
