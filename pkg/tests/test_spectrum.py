import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_net
from oracles import exhaustive_first_fit
from mbnetsim.bands import Band
from mbnetsim.routing import path_from_edges
from mbnetsim.spectrum import (
    SlotRange,
    SpectrumConflict,
    SpectrumPolicy,
    UnknownOwner,
    alloc_width,
    allocate,
    first_fit,
    lowest_free_run,
    release,
)


@pytest.fixture
def net2():
    return make_net([(0, 1, 50.0), (1, 2, 50.0)])


@pytest.mark.parametrize("slots, gb, width", [(4, 1, 5), (4, 0, 4), (10, 2, 12)])
def test_alloc_width(slots, gb, width):
    assert alloc_width(slots, SpectrumPolicy(guard_band_slots=gb)) == width


def test_policy_constants_fixed():
    with pytest.raises(ValueError):
        SpectrumPolicy(guard_band_slots=-1)
    with pytest.raises(ValueError):
        SpectrumPolicy(grid_ghz=50.0)
    with pytest.raises(ValueError):
        SpectrumPolicy(band_order_working=(Band.L, Band.C))
    with pytest.raises(ValueError):
        SpectrumPolicy(band_backup=Band.C)


def test_first_fit_empty(net2):
    p = path_from_edges(net2, 0, [0, 1])
    assert first_fit(net2, p, Band.C, 5) == SlotRange(0, 5)


def test_first_fit_respects_continuity(net2):
    allocate(net2, path_from_edges(net2, 1, [1]), Band.C, SlotRange(0, 3), owner="x")
    p = path_from_edges(net2, 0, [0, 1])
    assert first_fit(net2, p, Band.C, 2) == SlotRange(3, 2)


def test_first_fit_over_capacity(net2):
    p = path_from_edges(net2, 0, [0])
    assert first_fit(net2, p, Band.C, 321) is None
    assert first_fit(net2, p, Band.C, 320) == SlotRange(0, 320)


def test_allocate_marks_every_edge(net2):
    p = path_from_edges(net2, 0, [0, 1])
    allocate(net2, p, Band.L, SlotRange(7, 4), owner=1)
    for e in (0, 1):
        row = net2.slot_map(e, Band.L)
        assert row[7:11].tolist() == [1, 1, 1, 1]
        assert row.sum() == 4


def test_double_allocation_is_atomic_error(net2):
    p = path_from_edges(net2, 0, [0, 1])
    allocate(net2, p, Band.C, SlotRange(0, 5), owner=1)
    before = net2.occupancy.snapshot()
    with pytest.raises(SpectrumConflict):
        allocate(net2, p, Band.C, SlotRange(0, 5), owner=2)
    with pytest.raises(SpectrumConflict):
        allocate(net2, p, Band.C, SlotRange(3, 5), owner=3)
    assert net2.occupancy.snapshot() == before


def test_partial_conflict_leaves_no_trace(net2):
    allocate(net2, path_from_edges(net2, 1, [1]), Band.C, SlotRange(10, 1), owner="blk")
    before = net2.occupancy.snapshot()
    with pytest.raises(SpectrumConflict):
        allocate(net2, path_from_edges(net2, 0, [0, 1]), Band.C, SlotRange(8, 4), owner="new")
    assert net2.occupancy.snapshot() == before
    assert "new" not in net2.occupancy


def test_adjacent_allocations(net2):
    p = path_from_edges(net2, 0, [0])
    allocate(net2, p, Band.C, SlotRange(0, 5), owner=1)
    allocate(net2, p, Band.C, SlotRange(5, 5), owner=2)
    assert net2.occupancy.dump(0, Band.C) == "C: O0-9 F10-319"


def test_dump_format(net2):
    allocate(net2, path_from_edges(net2, 0, [0]), Band.C, SlotRange(5, 5), owner=1)
    assert net2.occupancy.dump(0, Band.C) == "C: F0-4 O5-9 F10-319"
    assert net2.occupancy.dump(1, Band.S) == "S: F0-731"


def test_release_round_trip(net2):
    before = net2.occupancy.snapshot()
    allocate(net2, path_from_edges(net2, 0, [0, 1]), Band.C, SlotRange(3, 4), owner=9)
    release(net2, 9)
    assert net2.occupancy.snapshot() == before
    assert net2.occupancy.occupied_units(Band.C) == 0


def test_shared_slot_survives_partner_release(net2):
    p = path_from_edges(net2, 0, [0])
    allocate(net2, p, Band.S, SlotRange(10, 1), owner="b1", shared=True)
    allocate(net2, p, Band.S, SlotRange(10, 1), owner="b2", shared=True)
    assert net2.slot_map(0, Band.S)[10] == 2
    release(net2, "b1")
    assert net2.slot_map(0, Band.S)[10] == 1
    assert net2.occupancy.occupied_units(Band.S) == 1
    release(net2, "b2")
    assert net2.occupancy.occupied_units(Band.S) == 0


def test_shared_cannot_stack_on_exclusive(net2):
    p = path_from_edges(net2, 0, [0])
    allocate(net2, p, Band.S, SlotRange(0, 4), owner="excl")
    with pytest.raises(SpectrumConflict):
        allocate(net2, p, Band.S, SlotRange(2, 4), owner="sh", shared=True)


def test_release_unknown(net2):
    with pytest.raises(UnknownOwner):
        release(net2, "ghost")


def test_lowest_free_run_edges():
    assert lowest_free_run(np.array([True, True]), 3) is None
    assert lowest_free_run(np.array([False, True, True]), 2) == 1
    assert lowest_free_run(np.array([True, False, True]), 2) is None


@st.composite
def occupancy_states(draw):
    hops = draw(st.sampled_from([1, 3]))
    n = 40
    rows = [draw(st.lists(st.booleans(), min_size=n, max_size=n)) for _ in range(hops)]
    width = draw(st.integers(1, 12))
    return rows, width


@given(occupancy_states())
def test_first_fit_matches_exhaustive_scan(state):
    rows, width = state
    net = make_net([(i, i + 1, 10.0) for i in range(len(rows))])
    for e, row in enumerate(rows):
        for j, busy in enumerate(row):
            if busy:
                allocate(net, path_from_edges(net, e, [e]), Band.C, SlotRange(j, 1), owner=(e, j))
    path = path_from_edges(net, 0, list(range(len(rows))))
    got = first_fit(net, path, Band.C, width)
    full_rows = [row + [False] * (320 - len(row)) for row in rows]
    want = exhaustive_first_fit(full_rows, width)
    assert (got.start if got else None) == want
