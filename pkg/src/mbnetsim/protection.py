"""Availability trigger and S-band backup provisioning.

A working lightpath gets a backup only when the product of its link
availabilities falls below the threshold. Backups are link-disjoint from
their working path and live in the S band only. In shared mode two backups
may hold the same (edge, slot) when their working paths have no edge in
common, which is enough to survive any single link failure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

import numpy as np

from mbnetsim.bands import BACKUP_BAND
from mbnetsim.lightpath import Lightpath, LightpathRequest, Role
from mbnetsim.qot import QotParams, path_gosnr
from mbnetsim.routing import Graph, Path, link_disjoint_path
from mbnetsim.spectrum import SlotRange, SpectrumPolicy, allocate, alloc_width, lowest_free_run


class ProtectionMode(str, Enum):
    NONE = "none"
    SHARED = "s-band-shared"
    DEDICATED = "s-band-dedicated"

    @classmethod
    def parse(cls, value: str | ProtectionMode) -> ProtectionMode:
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown protection mode {value!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class AvailabilityConfig:
    a_th: float = 0.999

    def __post_init__(self) -> None:
        if not 0 < self.a_th <= 1:
            raise ValueError(f"a_th must lie in (0, 1], got {self.a_th}")


@dataclass
class ProtectionRecord:
    working: Lightpath
    backup: Lightpath | None
    a_w: float
    active_path: Role = Role.WORKING

    @property
    def working_id(self) -> int:
        return self.working.id

    @property
    def backup_id(self) -> int | None:
        return None if self.backup is None else self.backup.id

    @property
    def active(self) -> Lightpath:
        return self.backup if self.active_path is Role.BACKUP else self.working


class BackupShareTable:
    """(edge, S-band slot) -> ids of the backups reserving it."""

    def __init__(self) -> None:
        self._by_edge: dict[int, dict[int, set[int]]] = {}
        self._backups_on: dict[int, dict[int, SlotRange]] = {}

    def owners(self, edge: int, slot: int) -> frozenset[int]:
        return frozenset(self._by_edge.get(edge, {}).get(slot, ()))

    def slots_on(self, edge: int) -> Mapping[int, set[int]]:
        return self._by_edge.get(edge, {})

    def backups_on(self, edge: int) -> Mapping[int, SlotRange]:
        """Backup id -> reserved range, for every backup crossing ``edge``."""
        return self._backups_on.get(edge, {})

    def add(self, backup: Lightpath) -> None:
        for e in backup.path.edges:
            self._backups_on.setdefault(e, {})[backup.id] = backup.range
            row = self._by_edge.setdefault(e, {})
            for s in backup.range.slots():
                row.setdefault(s, set()).add(backup.id)

    def remove(self, backup: Lightpath) -> None:
        for e in backup.path.edges:
            on = self._backups_on[e]
            del on[backup.id]
            if not on:
                del self._backups_on[e]
            row = self._by_edge[e]
            for s in backup.range.slots():
                owners = row[s]
                owners.discard(backup.id)
                if not owners:
                    del row[s]
            if not row:
                del self._by_edge[e]

    def items(self) -> Iterator[tuple[tuple[int, int], frozenset[int]]]:
        for e, row in self._by_edge.items():
            for s, owners in row.items():
                yield (e, s), frozenset(owners)

    def __len__(self) -> int:
        return sum(len(row) for row in self._by_edge.values())

    def reserved_units(self) -> int:
        """Distinct (edge, slot) pairs held by at least one backup."""
        return len(self)


@dataclass
class ProtectionState:
    mode: ProtectionMode = ProtectionMode.SHARED
    table: BackupShareTable = field(default_factory=BackupShareTable)
    records: dict[int, ProtectionRecord] = field(default_factory=dict)
    by_backup: dict[int, ProtectionRecord] = field(default_factory=dict)
    _units: int = field(default=0, repr=False)

    def register(self, record: ProtectionRecord) -> None:
        if record.working_id in self.records:
            raise ValueError(f"lightpath {record.working_id} already has a protection record")
        self.records[record.working_id] = record
        if record.backup is not None:
            self.by_backup[record.backup.id] = record
            self._units += record.backup.slot_edge_units

    def discard(self, working_id: int) -> ProtectionRecord:
        record = self.records.pop(working_id)
        if record.backup is not None:
            del self.by_backup[record.backup.id]
            self.table.remove(record.backup)
            self._units -= record.backup.slot_edge_units
        return record

    def backup_units(self) -> int:
        """Slot-edge units the current backups would need without sharing."""
        return self._units


def path_availability(net: Graph, path: Path) -> float:
    """Product of the availabilities of the edges on ``path``."""
    if not path.edges:
        raise ValueError("path has no edges")
    return math.prod(net.edge(e).availability for e in path.edges)


def needs_backup(a_w: float, cfg: AvailabilityConfig) -> bool:
    return a_w < cfg.a_th


def share_compatible(
    table: BackupShareTable,
    edge: int,
    slot: int,
    candidate_working: Path,
    records: Mapping[int, ProtectionRecord],
) -> bool:
    """True when every backup on (edge, slot) protects a working path edge-disjoint from ``candidate_working``.

    ``records`` maps backup ids to their protection records.
    """
    cand = candidate_working.edge_set
    return all(cand.isdisjoint(records[b].working.path.edges) for b in table.owners(edge, slot))


def _usable_slots(net: Graph, path: Path, working: Path, state: ProtectionState) -> np.ndarray:
    occ = net.occupancy
    usable = np.ones(BACKUP_BAND.capacity, dtype=bool)
    cand = working.edge_set
    verdict: dict[int, bool] = {}

    def compatible(backup_id: int) -> bool:
        ok = verdict.get(backup_id)
        if ok is None:
            ok = verdict[backup_id] = cand.isdisjoint(state.by_backup[backup_id].working.path.edges)
        return ok

    for e in path.edges:
        if state.mode is ProtectionMode.SHARED:
            # a slot is usable unless an exclusive owner or an incompatible
            # backup sits on it
            usable &= occ.shareable_mask((e,), BACKUP_BAND)
            for b, rng in state.table.backups_on(e).items():
                if not compatible(b):
                    usable[rng.start : rng.stop] = False
        else:
            usable &= occ.free_mask((e,), BACKUP_BAND)
    return usable


def provision_backup(
    net: Graph,
    working: Lightpath,
    request: LightpathRequest,
    state: ProtectionState,
    policy: SpectrumPolicy,
    params: QotParams,
    backup_id: int,
    candidates: Iterable[Path] | None = None,
) -> Lightpath | None:
    """Reserve an S-band backup for ``working``, or return None if no candidate fits.

    Candidates are tried in ranking order; on each, the lowest slot range that
    is free (or shareable in shared mode) on every edge is taken, provided the
    S-band GOSNR of the candidate passes. ``candidates`` overrides the
    link-disjoint search (callers may cache it).
    """
    if state.mode is ProtectionMode.NONE:
        return None
    width = alloc_width(request.requested_slots, policy)
    if candidates is None:
        candidates = link_disjoint_path(net, working.path, request.k)
    for cand in candidates:
        if not path_gosnr(cand, BACKUP_BAND, params, request.m).acceptable:
            continue
        start = lowest_free_run(_usable_slots(net, cand, working.path, state), width)
        if start is None:
            continue
        rng = SlotRange(start, width)
        allocate(net, cand, BACKUP_BAND, rng, backup_id, shared=state.mode is ProtectionMode.SHARED)
        backup = Lightpath(backup_id, cand, BACKUP_BAND, rng, Role.BACKUP)
        state.table.add(backup)
        return backup
    return None


def switchover(
    records: Iterable[ProtectionRecord],
    failed_edge: int,
    failed_edges: Iterable[int] = (),
    table: BackupShareTable | None = None,
) -> tuple[set[int], set[int]]:
    """Apply a link failure to protection records; returns (restored, lost) working ids.

    A record is affected when the path it currently carries traffic on uses
    ``failed_edge``. It is restored by flipping to its backup when the backup
    avoids every failed edge and, if ``table`` is given, none of the backup's
    slots is already carrying another restored lightpath.
    """
    down = set(failed_edges) | {failed_edge}
    records = sorted(records, key=lambda r: r.working_id)
    active_backups = {r.backup_id for r in records if r.active_path is Role.BACKUP}
    restored: set[int] = set()
    lost: set[int] = set()
    for rec in records:
        if failed_edge not in rec.active.path.edges:
            continue
        if rec.active_path is Role.BACKUP or rec.backup is None:
            lost.add(rec.working_id)
            continue
        backup = rec.backup
        ok = down.isdisjoint(backup.path.edges)
        if ok and table is not None:
            for e, s in itertools.product(backup.path.edges, backup.range.slots()):
                if (table.owners(e, s) - {backup.id}) & active_backups:
                    ok = False
                    break
        if ok:
            rec.active_path = Role.BACKUP
            active_backups.add(backup.id)
            restored.add(rec.working_id)
        else:
            lost.add(rec.working_id)
    return restored, lost


def share_violations(state: ProtectionState) -> list[tuple[int, int, int, int]]:
    """(edge, slot, backup_a, backup_b) for every co-owned slot whose working paths overlap."""
    bad = []
    for (e, s), owners in state.table.items():
        for a, b in itertools.combinations(sorted(owners), 2):
            wa = state.by_backup[a].working.path.edge_set
            wb = state.by_backup[b].working.path.edge_set
            if not wa.isdisjoint(wb):
                bad.append((e, s, a, b))
    return bad


def share_factor(state: ProtectionState, occupied_s_units: int) -> float:
    """Backup slot-edge demand over S-band units actually reserved (1.0 when nothing is reserved)."""
    if occupied_s_units == 0:
        return 1.0
    return state.backup_units() / occupied_s_units
