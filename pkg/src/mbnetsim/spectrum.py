"""Per-edge, per-band slot occupancy and first-fit spectrum assignment.

Every edge carries one occupancy row per band. A slot row keeps two counters:
the number of owners holding the slot and the number of those owners that hold
it exclusively. Working allocations are exclusive; backup allocations in the
shared-protection mode are non-exclusive, so several backups may stack on one
slot (whether they are allowed to is decided by the protection layer).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Hashable, Iterable, Sequence

import numpy as np

from mbnetsim.bands import BAND_CAPACITY, GRID_GHZ, Band

if TYPE_CHECKING:
    from mbnetsim.routing import Path


class SpectrumError(Exception):
    """Base class for occupancy errors."""


class SpectrumConflict(SpectrumError):
    """An allocation would overlap slots it is not allowed to use."""


class UnknownOwner(SpectrumError, KeyError):
    """Release of an owner that holds no allocation."""

    def __str__(self) -> str:
        return Exception.__str__(self)


@dataclass(frozen=True, order=True)
class SlotRange:
    start: int
    width: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"slot range start must be >= 0, got {self.start}")
        if self.width < 1:
            raise ValueError(f"slot range width must be >= 1, got {self.width}")

    @property
    def stop(self) -> int:
        return self.start + self.width

    def slots(self) -> range:
        return range(self.start, self.stop)

    def fits(self, band: Band) -> bool:
        return self.stop <= BAND_CAPACITY[band]


@dataclass(frozen=True)
class SpectrumPolicy:
    """Grid, guard band and band roles.

    Only the guard band is tunable; the grid and the band roles are fixed
    properties of the scheme and are checked on construction.
    """

    guard_band_slots: int = 1
    grid_ghz: float = GRID_GHZ
    band_order_working: tuple[Band, ...] = (Band.C, Band.L)
    band_backup: Band = Band.S

    def __post_init__(self) -> None:
        if self.guard_band_slots < 0:
            raise ValueError(f"guard_band_slots must be >= 0, got {self.guard_band_slots}")
        if self.grid_ghz != GRID_GHZ:
            raise ValueError(f"grid is fixed at {GRID_GHZ} GHz")
        if tuple(self.band_order_working) != (Band.C, Band.L):
            raise ValueError("working band order is fixed to C then L")
        if self.band_backup is not Band.S:
            raise ValueError("backup band is fixed to S")


@dataclass(frozen=True)
class Allocation:
    owner: Hashable
    band: Band
    edges: tuple[int, ...]
    range: SlotRange
    shared: bool


class Occupancy:
    """Slot occupancy for every edge of a network, one array per band."""

    def __init__(self, edge_ids: Sequence[int]) -> None:
        self.edge_ids = tuple(edge_ids)
        self._row = {e: i for i, e in enumerate(self.edge_ids)}
        if len(self._row) != len(self.edge_ids):
            raise ValueError("duplicate edge id")
        n_edges = self.n_edges = len(self.edge_ids)
        self._count = {b: np.zeros((n_edges, cap), dtype=np.int32) for b, cap in BAND_CAPACITY.items()}
        self._exclusive = {b: np.zeros((n_edges, cap), dtype=np.int32) for b, cap in BAND_CAPACITY.items()}
        self._allocations: dict[Hashable, Allocation] = {}
        self._units = {b: 0 for b in BAND_CAPACITY}

    def _rows(self, edges: Sequence[int]) -> list[int]:
        return [self._row[e] for e in edges]

    # -- queries ---------------------------------------------------------

    def owner_counts(self, band: Band) -> np.ndarray:
        """Read-only (n_edges, capacity) array of owner counts, rows in ``edge_ids`` order."""
        view = self._count[band].view()
        view.flags.writeable = False
        return view

    def free_mask(self, edges: Sequence[int], band: Band) -> np.ndarray:
        """Slots of ``band`` free on every edge in ``edges``."""
        rows = self._count[band][self._rows(edges)]
        return ~np.any(rows > 0, axis=0)

    def shareable_mask(self, edges: Sequence[int], band: Band) -> np.ndarray:
        """Slots of ``band`` with no exclusive owner on any edge in ``edges``."""
        rows = self._exclusive[band][self._rows(edges)]
        return ~np.any(rows > 0, axis=0)

    def occupied_count(self, edge: int, band: Band) -> int:
        return int(np.count_nonzero(self._count[band][self._row[edge]]))

    def free_count(self, edge: int, band: Band) -> int:
        return BAND_CAPACITY[band] - self.occupied_count(edge, band)

    def occupied_units(self, band: Band) -> int:
        """Occupied slot-edge units in ``band`` across the network."""
        return self._units[band]

    def max_exclusive_owners(self, band: Band) -> int:
        arr = self._exclusive[band]
        return int(arr.max()) if arr.size else 0

    def allocation(self, owner: Hashable) -> Allocation:
        try:
            return self._allocations[owner]
        except KeyError:
            raise UnknownOwner(f"unknown owner {owner!r}") from None

    def allocations(self) -> Iterable[Allocation]:
        return self._allocations.values()

    def __contains__(self, owner: Hashable) -> bool:
        return owner in self._allocations

    def snapshot(self) -> OccupancySnapshot:
        return OccupancySnapshot(
            {b: a.copy() for b, a in self._count.items()},
            {b: a.copy() for b, a in self._exclusive.items()},
            dict(self._allocations),
        )

    def dump(self, edge: int, band: Band) -> str:
        """Run-length encoding of one row, e.g. ``C: F0-4 O5-9 F10-319``."""
        row = self._count[band][self._row[edge]] > 0
        parts = []
        start = 0
        for i in range(1, len(row) + 1):
            if i == len(row) or row[i] != row[start]:
                parts.append(f"{'O' if row[start] else 'F'}{start}-{i - 1}")
                start = i
        return f"{band.value}: " + " ".join(parts)

    def dump_all(self) -> str:
        lines = []
        for e in self.edge_ids:
            lines.append(f"edge {e}")
            lines.extend("  " + self.dump(e, b) for b in Band)
        return "\n".join(lines)

    # -- mutation --------------------------------------------------------

    def add(self, owner: Hashable, band: Band, edges: Sequence[int], rng: SlotRange, shared: bool) -> Allocation:
        if owner in self._allocations:
            raise SpectrumConflict(f"owner {owner!r} already holds an allocation")
        edges = tuple(edges)
        if not edges:
            raise ValueError("allocation needs at least one edge")
        if len(set(edges)) != len(edges):
            raise ValueError("allocation edges must be distinct")
        for e in edges:
            if e not in self._row:
                raise ValueError(f"unknown edge {e}")
        if not rng.fits(band):
            raise SpectrumConflict(f"{rng} exceeds {band.value}-band capacity {BAND_CAPACITY[band]}")
        idx = self._rows(edges)
        sl = slice(rng.start, rng.stop)
        count = self._count[band]
        excl = self._exclusive[band]
        if shared:
            if np.any(excl[idx, sl] > 0):
                raise SpectrumConflict(f"{band.value}{rng} overlaps an exclusive allocation")
        elif np.any(count[idx, sl] > 0):
            raise SpectrumConflict(f"{band.value}{rng} is not free on every edge")
        self._units[band] += int(np.count_nonzero(count[idx, sl] == 0))
        count[idx, sl] += 1
        if not shared:
            excl[idx, sl] += 1
        alloc = Allocation(owner, band, edges, rng, shared)
        self._allocations[owner] = alloc
        return alloc

    def remove(self, owner: Hashable) -> Allocation:
        alloc = self.allocation(owner)
        idx = self._rows(alloc.edges)
        sl = slice(alloc.range.start, alloc.range.stop)
        count = self._count[alloc.band]
        count[idx, sl] -= 1
        if not alloc.shared:
            self._exclusive[alloc.band][idx, sl] -= 1
        self._units[alloc.band] -= int(np.count_nonzero(count[idx, sl] == 0))
        del self._allocations[owner]
        return alloc


@dataclass
class OccupancySnapshot:
    counts: dict[Band, np.ndarray]
    exclusive: dict[Band, np.ndarray]
    allocations: dict[Hashable, Allocation]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Occupancy):
            other = other.snapshot()
        if not isinstance(other, OccupancySnapshot):
            return NotImplemented
        return (
            self.allocations == other.allocations
            and all(np.array_equal(self.counts[b], other.counts[b]) for b in Band)
            and all(np.array_equal(self.exclusive[b], other.exclusive[b]) for b in Band)
        )


def alloc_width(request_slots: int, policy: SpectrumPolicy) -> int:
    """Slots consumed by a request: its demand plus one trailing guard band."""
    if request_slots < 1:
        raise ValueError(f"request_slots must be >= 1, got {request_slots}")
    return request_slots + policy.guard_band_slots


def lowest_free_run(free: np.ndarray, width: int) -> int | None:
    """Lowest start of ``width`` consecutive True entries in ``free``."""
    n = len(free)
    if width < 1 or width > n:
        return None
    csum = np.concatenate(([0], np.cumsum(free, dtype=np.int64)))
    hits = np.flatnonzero(csum[width:] - csum[:-width] == width)
    return int(hits[0]) if hits.size else None


def first_fit(net, path: Path, band: Band, width: int) -> SlotRange | None:
    """Lowest slot range of ``width`` free in ``band`` on every edge of ``path``."""
    start = lowest_free_run(net.occupancy.free_mask(path.edges, band), width)
    return None if start is None else SlotRange(start, width)


def allocate(net, path: Path, band: Band, rng: SlotRange, owner: Hashable, shared: bool = False) -> Allocation:
    """Record ``owner`` on ``rng`` of ``band`` along ``path``; all-or-nothing."""
    return net.occupancy.add(owner, band, path.edges, rng, shared)


def release(net, owner: Hashable) -> Allocation:
    """Drop ``owner`` from every slot it holds; co-owned slots stay occupied."""
    return net.occupancy.remove(owner)
