import io
import json
import itertools

import pytest
from hypothesis import given, strategies as st

from congest_shortcuts.errors import GenerationFailed, InvalidArgument, UnsupportedParameter
from congest_shortcuts.graph import Graph, diameter, is_connected
from congest_shortcuts.instances import (Partition, format_name, gen_clique_width_direct, gen_diameter_d_graph,
                                         gen_k_chordal, gen_random_connected_partition, k_chordal_node_count,
                                         parse_name, partition_into_path_parts, read_partition,
                                         singleton_partition, write_partition)

from conftest import connected_graphs


def kchordal_edge_families(k, x, N):
    K = k // 2 - 1
    return x, (N - 1) * x * K, (N - 1) * (x + 1), (x + 1) * (N - 1) * (N - 2) // 2


def test_kchordal_small_example():
    inst = gen_k_chordal(4, 2, 3)
    assert (inst.graph.n, inst.graph.m) == (9, 15)
    assert kchordal_edge_families(4, 2, 3) == (2, 4, 6, 3)


def test_kchordal_degenerate():
    inst = gen_k_chordal(4, 0, 2)
    assert inst.graph.n == 2 and inst.graph.edges == {(0, 1)}


def test_kchordal_k6_count():
    inst = gen_k_chordal(6, 2, 3)
    assert inst.K == 2 and inst.graph.n == 13


@pytest.mark.parametrize("k", [3, 5, 2, 1])
def test_odd_or_small_k_unsupported(k):
    with pytest.raises(UnsupportedParameter):
        gen_k_chordal(k, 1, 3)


@pytest.mark.parametrize("k,x,N", list(itertools.product([4, 6, 8], [0, 1, 3], [2, 3, 5])))
def test_kchordal_counts(k, x, N):
    inst = gen_k_chordal(k, x, N)
    assert inst.graph.n == k_chordal_node_count(k, x, N)
    assert inst.graph.m == sum(kchordal_edge_families(k, x, N))


def test_kchordal_id_layout():
    inst = gen_k_chordal(6, 2, 3)
    assert inst.row(1) == [0, 1, 2]
    assert inst.row(2) == [3, 4, 5, 6, 7]
    assert inst.vid(3, 0) == 8
    # E3 attaches v(1,j) to column jK of every later row
    assert inst.graph.has_edge(inst.vid(1, 1), inst.vid(3, 2))
    assert not inst.graph.has_edge(inst.vid(1, 1), inst.vid(3, 1))


def test_id_map_json_names():
    inst = gen_k_chordal(4, 1, 2)
    doc = json.loads(inst.id_map_json())
    assert doc["version"] == 1 and doc["ids"]["v(1,0)"] == 0
    assert parse_name(format_name(("u", 3, 5))) == ("u", 3, 5)


def test_cw_direct_examples():
    g = gen_clique_width_direct(2, 1).graph
    assert (g.n, g.m) == (7, 10)
    # with one row the two columns are joined by a single edge, so m = 2 + 2 + 1
    g = gen_clique_width_direct(1, 1).graph
    assert (g.n, g.m) == (5, 5)


@pytest.mark.parametrize("gamma,p", list(itertools.product(range(1, 5), range(1, 5))))
def test_cw_direct_counts(gamma, p):
    g = gen_clique_width_direct(gamma, p).graph
    assert g.n == (2 ** (p + 1) - 1) + gamma * 2 ** p
    assert g.m == (2 ** (p + 1) - 2) + gamma * 2 ** p + (2 ** p - 1) * gamma ** 2


def test_partition_validation():
    with pytest.raises(InvalidArgument):
        Partition.from_sets(3, [[0], []])
    with pytest.raises(InvalidArgument):
        Partition.from_sets(3, [[0, 1], [1]])
    with pytest.raises(InvalidArgument):
        Partition.from_sets(3, [[3]])
    p = Partition.from_sets(4, [[0, 1], [3]])
    assert p.part_of == [0, 0, None, 1]
    assert not p.covers()
    with pytest.raises(InvalidArgument):
        Partition.from_sets(3, [[0, 2]]).validate(Graph(3, [(0, 1), (1, 2)]))


def test_partition_io_roundtrip():
    p = Partition.from_sets(5, [[0, 1], [3], [4]])
    buf = io.StringIO()
    write_partition(p, buf)
    assert read_partition(io.StringIO(buf.getvalue()), 5) == p
    with pytest.raises(InvalidArgument):
        read_partition(io.StringIO("0 0\n1 2\n"), 3)


def test_random_partition_extremes():
    g = Graph(6, [(i, i + 1) for i in range(5)])
    assert gen_random_connected_partition(g, 6, 1) == singleton_partition(6) or \
        sorted(map(sorted, gen_random_connected_partition(g, 6, 1))) == [[v] for v in range(6)]
    assert gen_random_connected_partition(g, 1, 1).parts == (frozenset(range(6)),)
    with pytest.raises(InvalidArgument):
        gen_random_connected_partition(g, 7, 1)


def test_random_partition_path_intervals():
    g = Graph(10, [(i, i + 1) for i in range(9)])
    parts = gen_random_connected_partition(g, 2, 42)
    assert parts.covers()
    for p in parts:
        assert sorted(p) == list(range(min(p), max(p) + 1))


@given(connected_graphs(max_n=40), st.data())
def test_random_partition_invariants(g, data):
    k = data.draw(st.integers(1, g.n))
    parts = gen_random_connected_partition(g, k, data.draw(st.integers(0, 1000)))
    assert len(parts) == k and parts.covers()
    parts.validate(g)


def test_random_partition_deterministic():
    g = gen_k_chordal(4, 5, 6).graph
    assert gen_random_connected_partition(g, 7, 3) == gen_random_connected_partition(g, 7, 3)


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("n", [8, 40, 150])
def test_diameter_d_graph(n, d):
    g = gen_diameter_d_graph(n, d, seed=n)
    assert diameter(g) == d
    assert gen_diameter_d_graph(n, d, seed=n) == g


def test_diameter_d_fixture_shape():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)])
    assert diameter(g) == 3


def test_diameter_d_complete_graph_fails():
    with pytest.raises(GenerationFailed):
        gen_diameter_d_graph(10, 3, edge_prob=1.0, max_tries=5)


def test_path_parts():
    inst = gen_k_chordal(4, 2, 3)
    parts = partition_into_path_parts(inst, 1)
    assert [sorted(p) for p in parts] == [inst.row(1), inst.row(2), inst.row(3)]
    parts.validate(inst.graph)
    assert len(partition_into_path_parts(inst, 3)) == 1
    assert len(partition_into_path_parts(inst, 10)) == 1
    big = gen_k_chordal(6, 3, 7)
    for p in partition_into_path_parts(big, 2):
        assert is_connected(big.graph, p)
