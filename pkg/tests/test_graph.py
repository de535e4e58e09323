import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netgauss.errors import (AsymmetricMatrix, EmptyGraph, InputError, NegativeWeight,
                             NodeOutOfRange, ParseError, SelfLoop)
from netgauss.graph import (closeness, graph_distance, is_connected, largest_component, read_edge_list,
                            read_graph, read_pajek, subgraph, validate, write_edge_list, write_pajek)

from conftest import complete_graph, path_graph, random_connected_graph, star_graph


def test_validate_smallest_graph():
    g = validate([[0, 1], [1, 0]])
    assert g.n == 2 and g.edge_count == 1


def test_validate_asymmetric_names_indices():
    with pytest.raises(AsymmetricMatrix) as exc:
        validate([[0, 1], [2, 0]])
    assert exc.value.indices == (0, 1)


def test_validate_self_loop():
    with pytest.raises(SelfLoop) as exc:
        validate([[1, 0], [0, 0]])
    assert exc.value.node == 0


def test_validate_negative():
    with pytest.raises(NegativeWeight):
        validate([[0, -1], [-1, 0]])


def test_weights_are_read_only():
    g = validate([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        g.weights[0, 1] = 5


def test_degrees_are_row_sums():
    rng = np.random.default_rng(0)
    g = random_connected_graph(12, rng)
    assert np.array_equal(g.degrees, g.weights.sum(axis=1))


def test_is_connected_examples(P2, K3):
    assert is_connected(P2)
    assert not is_connected(validate(np.zeros((2, 2))))
    assert is_connected(K3)


def _disjoint_union(*graphs):
    n = sum(g.n for g in graphs)
    W = np.zeros((n, n))
    k = 0
    for g in graphs:
        W[k:k + g.n, k:k + g.n] = g.weights
        k += g.n
    return validate(W)


def test_largest_component_examples(P2, K3):
    g = _disjoint_union(K3, validate(np.zeros((1, 1))))
    assert largest_component(g).same_as(K3)
    assert largest_component(K3) is K3
    two = _disjoint_union(P2, P2)
    lc = largest_component(two)
    assert lc.n == 2 and lc.node_ids == (0, 1)


def test_largest_component_empty():
    with pytest.raises(EmptyGraph):
        largest_component(validate(np.zeros((0, 0))))


def test_largest_component_is_connected():
    rng = np.random.default_rng(3)
    for _ in range(10):
        upper = np.triu(rng.random((15, 15)) < 0.1, 1)
        g = validate((upper | upper.T).astype(float))
        assert is_connected(largest_component(g))


def test_graph_distance_examples(P2):
    assert graph_distance(P2, 0, 1) == 1
    assert graph_distance(path_graph(3), 0, 2) == 2
    assert graph_distance(P2, 0, 1, {(0, 1): 0.25}) == 0.25


def test_graph_distance_unreachable_and_range():
    g = validate(np.zeros((2, 2)))
    assert graph_distance(g, 0, 1) == math.inf
    with pytest.raises(NodeOutOfRange):
        graph_distance(g, 0, 5)


def test_closeness_examples():
    star = star_graph(4)
    assert closeness(star, 0) == pytest.approx(1.0)
    assert closeness(star, 1) == pytest.approx(4 / 7)
    assert closeness(validate(np.zeros((3, 3))), 0) == 0


def test_cost_map_must_be_positive(P2):
    with pytest.raises(ValueError):
        graph_distance(P2, 0, 1, {(0, 1): 0.0})


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 50), st.integers(0, 2 ** 32 - 1))
def test_distance_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < 0.15, 1)
    g = validate((upper | upper.T).astype(float))
    u, v = rng.integers(n, size=2)
    assert graph_distance(g, u, v) == graph_distance(g, v, u)


def test_subgraph_keeps_order_and_labels():
    g = validate(complete_graph(4).weights, node_ids=list("abcd"), node_labels=[1, 2, 3, 4])
    s = subgraph(g, [2, 0])
    assert s.node_ids == ("c", "a") and s.node_labels == (3, 1)


def test_edge_list_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    g = random_connected_graph(9, rng)
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    back = read_edge_list(path)
    order = [back.node_ids.index(str(i)) for i in g.node_ids]
    assert np.array_equal(back.weights[np.ix_(order, order)], g.weights)


def test_edge_list_tokens_and_comments(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("# header\nx y 2.5\ny z  # trailing comment\n\n")
    g = read_edge_list(path)
    assert g.node_ids == ("x", "y", "z")
    assert g.weights[0, 1] == 2.5 and g.weights[1, 2] == 1.0


def test_edge_list_errors(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("a b\na b c d\n")
    with pytest.raises(ParseError) as exc:
        read_edge_list(path)
    assert exc.value.line == 2
    path.write_text("a b 1\nb a 2\n")
    with pytest.raises(ParseError):
        read_edge_list(path)
    with pytest.raises(InputError):
        read_graph(tmp_path / "missing.edges")


def test_pajek_round_trip(tmp_path):
    g = validate(path_graph(4).weights, node_ids=["p", "q", "r", "s"], node_labels=[1, 1, 2, 2])
    path = tmp_path / "g.net"
    write_pajek(g, path)
    back = read_graph(path)
    assert back.same_as(g) and back.node_ids == g.node_ids and back.node_labels == (1, 1, 2, 2)


def test_pajek_rejects_unknown_content(tmp_path):
    path = tmp_path / "g.net"
    path.write_text("*Vertices 2\n1 \"a\"\n2 \"b\"\n*Arcs\n1 2\n")
    with pytest.raises(ParseError) as exc:
        read_pajek(path)
    assert exc.value.line == 4
    path.write_text("*Vertices 2\n*Edges\n1 3\n")
    with pytest.raises(ParseError):
        read_pajek(path)
