import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_net
from oracles import all_simple_paths, ranked_simple_paths
from mbnetsim.routing import (
    UnknownNode,
    k_shortest_paths,
    link_disjoint_path,
    path_from_edges,
    shortest_path,
)


@st.composite
def small_graphs(draw, max_nodes=8):
    n = draw(st.integers(2, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True))
    # small integer lengths make exact ties common, which exercises the tie-break
    lengths = draw(st.lists(st.integers(1, 4), min_size=len(chosen), max_size=len(chosen)))
    edges = [(u, v, float(L)) for (u, v), L in zip(chosen, lengths)]
    return n, edges


def test_line_graph(line3):
    p = shortest_path(line3, 0, 2)
    assert p.edges == (0, 1)
    assert p.nodes == (0, 1, 2)
    assert p.cost_km == 200.0


def test_triangle_prefers_two_hops(triangle):
    p = shortest_path(triangle, 0, 1)
    assert p.nodes == (0, 2, 1)
    assert p.cost_km == 200.0


def test_disconnected_returns_none():
    net = make_net([(0, 1, 1.0), (2, 3, 1.0)])
    assert shortest_path(net, 0, 3) is None
    assert k_shortest_paths(net, 0, 3, 5) == []


def test_unknown_node(line3):
    with pytest.raises(UnknownNode):
        shortest_path(line3, 0, 9)
    with pytest.raises(UnknownNode):
        k_shortest_paths(line3, 9, 0, 2)


def test_same_endpoints_rejected(line3):
    with pytest.raises(ValueError):
        shortest_path(line3, 1, 1)


def test_triangle_k2(triangle):
    paths = k_shortest_paths(triangle, 0, 1, 2)
    assert [p.nodes for p in paths] == [(0, 2, 1), (0, 1)]
    assert [p.cost_km for p in paths] == [200.0, 300.0]
    oracle = ranked_simple_paths([(0, 1, 300.0), (0, 2, 100.0), (2, 1, 100.0)], 3, 0, 1)
    assert [p.edges for p in paths] == [pe for pe, _ in oracle]


def test_k1_is_shortest(triangle):
    assert k_shortest_paths(triangle, 0, 1, 1) == [shortest_path(triangle, 0, 1)]


def test_k4_complete_graph_has_five_paths():
    edges = [(u, v, 1.0) for u in range(4) for v in range(u + 1, 4)]
    net = make_net(edges)
    paths = k_shortest_paths(net, 0, 3, 10)
    assert len(all_simple_paths(edges, 4, 0, 3)) == 5
    assert len(paths) == 5


def test_tie_break_hops_then_edge_ids():
    # two 2-hop paths of equal cost and a direct edge of the same cost
    net = make_net([(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0), (0, 3, 2.0)])
    paths = k_shortest_paths(net, 0, 3, 3)
    assert [p.edges for p in paths] == [(4,), (0, 1), (2, 3)]


def test_float_ties_are_exact():
    # 0.1 + 0.2 != 0.3 in floats; exact summation must not treat them as a tie
    net = make_net([(0, 1, 0.1), (1, 2, 0.2), (0, 2, 0.3)])
    p = shortest_path(net, 0, 2)
    assert p.edges == (2,)


def test_path_from_edges_rejects_loops(ring4):
    with pytest.raises(ValueError):
        path_from_edges(ring4, 0, [0, 1, 2, 3])


def test_disjoint_ring(ring4):
    working = path_from_edges(ring4, 0, [0, 1])
    [backup] = link_disjoint_path(ring4, working, 3)
    assert backup.nodes == (0, 3, 2)
    assert backup.edge_set.isdisjoint(working.edge_set)


def test_disjoint_bridge(line3):
    working = shortest_path(line3, 0, 2)
    assert link_disjoint_path(line3, working, 3) == []


def test_disjoint_nsfnet(nsf):
    working = shortest_path(nsf, 0, 7)
    backups = link_disjoint_path(nsf, working, 5)
    assert backups
    for b in backups:
        assert set(b.edges) & set(working.edges) == set()
        assert (b.source, b.target) == (0, 7)


@given(small_graphs())
def test_k_shortest_matches_enumeration(graph):
    n, edges = graph
    net = make_net(edges, n_nodes=n)
    got = k_shortest_paths(net, 0, n - 1, 1000)
    want = ranked_simple_paths(edges, n, 0, n - 1)[:1000]
    assert [p.edges for p in got] == [pe for pe, _ in want]
    assert [p.nodes for p in got] == [pn for _, pn in want]


@given(small_graphs())
def test_path_invariants(graph):
    n, edges = graph
    net = make_net(edges, n_nodes=n)
    got = k_shortest_paths(net, 0, n - 1, 20)
    assert len({p.edges for p in got}) == len(got)
    assert got == sorted(got)
    if got:
        assert got[0] == shortest_path(net, 0, n - 1)
    for p in got:
        assert len(set(p.nodes)) == len(p.nodes)
        assert math.isclose(p.cost_km, sum(net.edge(e).length_km for e in p.edges), abs_tol=1e-9)
        for i, eid in enumerate(p.edges):
            assert net.edge(eid).endpoints == {p.nodes[i], p.nodes[i + 1]}


@given(small_graphs(), st.integers(1, 5))
def test_disjoint_never_overlaps(graph, k):
    n, edges = graph
    net = make_net(edges, n_nodes=n)
    working = shortest_path(net, 0, n - 1)
    if working is None:
        return
    for b in link_disjoint_path(net, working, k):
        assert b.edge_set.isdisjoint(working.edge_set)


def test_parallel_edges_ranked_by_id():
    net = make_net([(0, 1, 5.0), (0, 1, 5.0), (0, 1, 3.0)])
    assert [p.edges for p in k_shortest_paths(net, 0, 1, 5)] == [(2,), (0,), (1,)]
