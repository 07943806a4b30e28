import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graphs
from rocgraph.graph import (
    EdgeListParseError,
    build_graph,
    codegree,
    connected_components,
    read_edge_list,
    write_edge_list,
)


def test_build_complete_graph(k4):
    assert k4.m == 6
    assert k4.degrees.tolist() == [3, 3, 3, 3]


def test_build_deduplicates_and_normalises():
    g = build_graph(3, [(0, 1), (0, 1), (1, 0)])
    assert g.m == 1
    assert g.edges.tolist() == [[0, 1]]


def test_self_loop_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        build_graph(3, [(1, 1)])


@pytest.mark.parametrize("pair", [(0, 3), (-1, 0)])
def test_out_of_range_rejected(pair):
    with pytest.raises(IndexError):
        build_graph(3, [pair])


def test_graph_is_read_only(k4):
    with pytest.raises(ValueError):
        k4.indices[0] = 2
    with pytest.raises(ValueError):
        k4.edges[0, 0] = 3


def test_codegree_examples(k4, c5):
    assert codegree(k4, 0, 1) == 2
    path = build_graph(3, [(0, 1), (1, 2)])
    assert codegree(path, 0, 2) == 1
    assert codegree(c5, 0, 1) == 0
    with pytest.raises(ValueError):
        codegree(k4, 2, 2)


def test_components_examples(k4):
    assert np.unique(connected_components(k4)).size == 1
    assert np.unique(connected_components(build_graph(3, []))).size == 3
    two = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    labels = connected_components(two)
    assert np.unique(labels).size == 2
    assert labels[0] == labels[2] != labels[3] == labels[5]


def test_read_path_graph():
    g = read_edge_list(b"3 2\n0 1\n1 2\n")
    assert g == build_graph(3, [(0, 1), (1, 2)])


def test_write_is_canonical():
    shuffled = [(3, 2), (1, 0), (2, 0), (3, 0), (2, 1), (1, 3)]
    assert write_edge_list(build_graph(4, shuffled)) == b"4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"


def test_read_ignores_comments():
    g = read_edge_list(b"# header comment\n3 1\n# edge follows\n2 0\n")
    assert g.edges.tolist() == [[0, 2]]


@pytest.mark.parametrize("text, line", [
    (b"3 1\n0 5\n", 2),
    (b"3 2\n0 1\n", 1),
    (b"3 1\n0 x\n", 2),
    (b"3\n", 1),
    (b"", 1),
    (b"3 1\n1 1\n", 2),
    (b"3 2\n0 1\n1 0\n", 3),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(EdgeListParseError) as info:
        read_edge_list(text)
    assert info.value.line == line


@given(small_graphs(max_n=12))
def test_degree_sum_is_twice_edge_count(g):
    assert int(g.degrees.sum()) == 2 * g.m


@given(small_graphs(max_n=10), st.randoms(use_true_random=False))
def test_build_is_order_and_orientation_insensitive(g, rnd):
    edges = [tuple(e) for e in g.edges.tolist()]
    rnd.shuffle(edges)
    edges = [(v, u) if rnd.random() < 0.5 else (u, v) for u, v in edges]
    again = build_graph(g.n, edges)
    assert again == g
    assert np.array_equal(again.indptr, g.indptr) and np.array_equal(again.indices, g.indices)


@given(small_graphs(max_n=12))
def test_edge_list_round_trip(g):
    data = write_edge_list(g)
    assert read_edge_list(data) == g
    assert write_edge_list(read_edge_list(data)) == data


@given(small_graphs(max_n=8, min_n=2))
def test_codegree_matches_brute_force(g):
    adj = {v: set(g.neighbors(v).tolist()) for v in range(g.n)}
    for u, v in itertools.combinations(range(g.n), 2):
        brute = sum(1 for w in range(g.n) if w in adj[u] and w in adj[v])
        assert codegree(g, u, v) == brute


def test_codegree_exhaustive_up_to_five_vertices():
    for n in range(2, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = build_graph(n, [p for b, p in enumerate(pairs) if mask >> b & 1])
            A = np.zeros((n, n), dtype=int)
            for u, v in g.edges.tolist():
                A[u, v] = A[v, u] = 1
            C = A @ A
            for u, v in pairs:
                assert codegree(g, u, v) == C[u, v]


def test_isolated_vertices_are_representable():
    g = build_graph(5, [(0, 1)])
    assert g.n == 5 and g.degrees.tolist() == [1, 1, 0, 0, 0]
