import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_net
from mbnetsim.bands import BAND_CAPACITY, Band, band_capacity
from mbnetsim.routing import shortest_path
from mbnetsim.topology import (
    TopologyError,
    default_availability,
    load_topology,
    nsfnet,
    remove_edges,
    write_topology,
)


@pytest.mark.parametrize("band, slots", [("C", 320), ("L", 548), ("S", 732)])
def test_band_capacity(band, slots):
    assert band_capacity(band) == slots
    assert Band(band).capacity == slots


def test_working_capacity_is_868():
    assert band_capacity(Band.C) + band_capacity(Band.L) == 868


def test_load_two_node_edge():
    net = load_topology(
        {"nodes": [{"id": 0}, {"id": 1}], "edges": [{"id": 0, "u": 0, "v": 1, "length_km": 100.0, "availability": 0.999}]}
    )
    assert len(net.edges) == 1
    assert net.edge(0).availability == 0.999
    total_free = sum(net.occupancy.free_count(0, b) for b in Band)
    assert total_free == 320 + 548 + 732


def test_unknown_node_rejected():
    doc = {"nodes": [{"id": i} for i in range(4)], "edges": [{"id": 0, "u": 0, "v": 7, "length_km": 10.0}]}
    with pytest.raises(TopologyError, match="unknown node"):
        load_topology(doc)


def test_default_availability_from_length():
    doc = {"nodes": [{"id": 0}, {"id": 1}], "edges": [{"id": 0, "u": 0, "v": 1, "length_km": 400.0}]}
    net = load_topology(doc)
    assert net.edge(0).availability == pytest.approx(0.996, abs=1e-15)


def test_default_availability_clamped():
    assert default_availability(0.0) == 1.0
    assert 0 < default_availability(1e9) <= 1


@pytest.mark.parametrize(
    "edge, msg",
    [
        ({"id": 0, "u": 0, "v": 1, "length_km": 0.0}, "non-positive length"),
        ({"id": 0, "u": 0, "v": 1, "length_km": -5}, "non-positive length"),
        ({"id": 0, "u": 0, "v": 1, "length_km": 5, "availability": 0.0}, "outside"),
        ({"id": 0, "u": 0, "v": 1, "length_km": 5, "availability": 1.2}, "outside"),
        ({"id": 0, "u": 1, "v": 1, "length_km": 5}, "self-loop"),
        ({"id": 0, "u": 0, "length_km": 5}, "missing 'v'"),
    ],
)
def test_bad_edges(edge, msg):
    with pytest.raises(TopologyError, match=msg):
        load_topology({"nodes": [{"id": 0}, {"id": 1}], "edges": [edge]})


def test_duplicate_edge_id():
    doc = {
        "nodes": [{"id": 0}, {"id": 1}, {"id": 2}],
        "edges": [{"id": 0, "u": 0, "v": 1, "length_km": 1}, {"id": 0, "u": 1, "v": 2, "length_km": 1}],
    }
    with pytest.raises(TopologyError, match="duplicate edge id"):
        load_topology(doc)


def test_malformed_documents(tmp_path):
    with pytest.raises(TopologyError):
        load_topology({"edges": []})
    with pytest.raises(TopologyError):
        load_topology([1, 2])
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(TopologyError, match="malformed"):
        load_topology(bad)
    with pytest.raises(FileNotFoundError):
        load_topology(tmp_path / "nope.json")


def test_remove_only_edge_disconnects():
    net = make_net([(0, 1, 10.0)])
    view = remove_edges(net, {0})
    assert shortest_path(view, 0, 1) is None
    assert not view.connected(0, 1)
    # original untouched
    assert shortest_path(net, 0, 1) is not None


def test_remove_nothing_is_identity(triangle):
    view = remove_edges(triangle, set())
    assert [e.id for e in view.edges] == [e.id for e in triangle.edges]
    assert shortest_path(view, 0, 1) == shortest_path(triangle, 0, 1)


def test_remove_edge_reroutes_triangle():
    # A-B, B-C, A-C all 100 km; without A-B the path is A-C-B
    net = make_net([(0, 1, 100.0), (1, 2, 100.0), (0, 2, 100.0)])
    p = shortest_path(remove_edges(net, {0}), 0, 1)
    assert p.nodes == (0, 2, 1)
    assert p.edges == (2, 1)


def test_remove_unknown_edge():
    net = make_net([(0, 1, 10.0)])
    with pytest.raises(KeyError):
        remove_edges(net, {5})


def test_views_compose(ring4):
    v = remove_edges(remove_edges(ring4, {0}), {2})
    assert v.removed == frozenset({0, 2})
    assert {e.id for e in v.edges} == {1, 3}


def test_nsfnet_bundle():
    net = nsfnet()
    assert len(net.nodes) == 14
    assert len(net.edges) == 21
    assert len(net.component_of(0)) == 14


def test_round_trip(tmp_path, nsf):
    out = tmp_path / "copy.json"
    write_topology(nsf, out)
    again = load_topology(out)
    assert again.to_document() == nsf.to_document()
    assert json.loads(out.read_text())["edges"][0]["length_km"] == nsf.edges[0].length_km


def test_capacity_conservation_after_allocations(nsf):
    from mbnetsim.routing import path_from_edges
    from mbnetsim.spectrum import SlotRange, allocate

    allocate(nsf, path_from_edges(nsf, 0, [0]), Band.C, SlotRange(10, 7), owner=1)
    allocate(nsf, path_from_edges(nsf, 0, [1]), Band.S, SlotRange(0, 3), owner=2, shared=True)
    for e in nsf.edge_ids:
        for b in Band:
            assert nsf.occupancy.occupied_count(e, b) + nsf.occupancy.free_count(e, b) == BAND_CAPACITY[b]


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.floats(1, 3000)), min_size=1, max_size=12))
def test_round_trip_property(triples):
    triples = [(u, v, L) for u, v, L in triples if u != v]
    if not triples:
        return
    net = make_net(triples, n_nodes=6)
    again = load_topology(net.to_document())
    assert again.to_document() == net.to_document()
