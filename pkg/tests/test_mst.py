import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from congest_shortcuts.congest import SimConfig
from congest_shortcuts.errors import InvalidArgument, NoSpanningTree
from congest_shortcuts.graph import Graph, is_connected
from congest_shortcuts.instances import Partition, gen_diameter_d_graph, gen_k_chordal
from congest_shortcuts.mst import (CHORDAL, WeightedGraph, assign_random_weights, boruvka_distributed,
                                   kruskal_oracle, mst_bandwidth_factor, mwoe_oracle, phase_bound)
from congest_shortcuts.shortcuts import ShortcutConfig

from conftest import random_connected_graph


def cfg(wg, seed=0):
    return SimConfig(bandwidth_factor=mst_bandwidth_factor(wg), seed=seed)


def brute_force_mst_weight(wg):
    g = wg.graph
    best = None
    for tree in itertools.combinations(g.edge_list(), g.n - 1):
        t = Graph(g.n, tree)
        if is_connected(t, range(g.n)):
            w = sum(wg.weights[e] for e in tree)
            best = w if best is None else min(best, w)
    return best


def test_triangle(triangle):
    wg = WeightedGraph(triangle, {(0, 1): 1, (1, 2): 2, (0, 2): 3})
    assert kruskal_oracle(wg).weight == 3
    assert kruskal_oracle(wg).edges == {(0, 1), (1, 2)}


def test_tree_is_its_own_mst():
    g = random_connected_graph(15, 0, 3)
    wg = assign_random_weights(g, 1)
    assert kruskal_oracle(wg).edges == g.edges


def test_weight_validation(triangle):
    with pytest.raises(InvalidArgument):
        WeightedGraph(triangle, {(0, 1): 1, (1, 2): 1, (0, 2): 3})
    with pytest.raises(InvalidArgument):
        WeightedGraph(triangle, {(0, 1): 1, (1, 2): 2})
    with pytest.raises(InvalidArgument):
        WeightedGraph(triangle, {(0, 1): 0, (1, 2): 2, (0, 2): 3})
    with pytest.raises(NoSpanningTree):
        kruskal_oracle(WeightedGraph(Graph(3, [(0, 1)]), {(0, 1): 1}))


@pytest.mark.parametrize("seed", range(6))
def test_kruskal_matches_brute_force(seed):
    g = random_connected_graph(9, 4, seed)
    wg = assign_random_weights(g, seed)
    assert kruskal_oracle(wg).weight == brute_force_mst_weight(wg)


def test_random_weights_give_different_trees():
    k4 = Graph(4, itertools.combinations(range(4), 2))
    trees = {kruskal_oracle(assign_random_weights(k4, s)).edges for s in range(10)}
    assert len(trees) >= 2
    assert assign_random_weights(k4, 3) == assign_random_weights(k4, 3)


def test_mwoe_oracle():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    wg = WeightedGraph(g, {(0, 1): 3, (1, 2): 1, (2, 3): 2})
    parts = Partition.from_sets(4, [[0, 1], [2, 3]])
    assert mwoe_oracle(wg, parts) == [(1, 2), (1, 2)]


def test_phase_bound():
    assert [phase_bound(n) for n in (1, 2, 3, 8, 9)] == [0, 1, 2, 3, 4]


def test_path_single_phase_merge():
    # every node but 0 has its lighter edge on the left, so one phase picks all edges
    g = Graph(6, [(i, i + 1) for i in range(5)])
    wg = WeightedGraph(g, {(i, i + 1): i + 1 for i in range(5)})
    res = boruvka_distributed(wg, CHORDAL, cfg(wg))
    assert res.edges == g.edges
    assert res.phases == 1


def test_bandwidth_factor_enforced(triangle):
    wg = WeightedGraph(triangle, {(0, 1): 1, (1, 2): 2, (0, 2): 3})
    with pytest.raises(InvalidArgument):
        boruvka_distributed(wg, CHORDAL, SimConfig())
    with pytest.raises(InvalidArgument):
        boruvka_distributed(wg, 5, cfg(wg))


@settings(max_examples=25)
@given(st.integers(2, 30), st.integers(0, 40), st.integers(0, 10 ** 6))
def test_boruvka_chordal_scheme_matches_kruskal(n, extra, seed):
    g = random_connected_graph(n, extra, seed)
    wg = assign_random_weights(g, seed)
    res = boruvka_distributed(wg, CHORDAL, cfg(wg, seed))
    assert res.edges == kruskal_oracle(wg).edges
    assert res.phases <= phase_bound(n)
    assert all(t.bandwidth_ok() for t in res.traces)


def test_boruvka_on_kchordal():
    inst = gen_k_chordal(4, 6, 8)
    wg = assign_random_weights(inst.graph, 2)
    res = boruvka_distributed(wg, CHORDAL, cfg(wg))
    assert res.edges == kruskal_oracle(wg).edges
    assert res.phases <= math.ceil(math.log2(inst.graph.n))
    for t in res.traces:
        assert t.phases["step1"] == 1 and t.phases["fragments"] == 1


@pytest.mark.parametrize("d", [3, 4])
def test_boruvka_small_diameter(d):
    g = gen_diameter_d_graph(60, d, seed=4)
    wg = assign_random_weights(g, 4)
    sc_cfg = ShortcutConfig(large_threshold_override=0, hash_degree_cap=8)
    res = boruvka_distributed(wg, d, cfg(wg, 4), sc_cfg)
    assert res.edges == kruskal_oracle(wg).edges
    assert res.phases <= phase_bound(g.n)
    assert len(res.fragments) == res.phases and len(res.fragments[0]) == g.n
