"""Request admission, departures, link failures and the event-driven simulation loop.

Admission per request: compute up to ``k`` shortest paths; for each path in
order try the C band, then the L band, first-fit. A (path, band) pair is taken
when a slot range exists and its GOSNR passes the threshold. Once the working
lightpath is in place its availability is checked and, if below threshold, an
S-band backup is reserved.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, TextIO

import numpy as np

from mbnetsim.bands import BAND_CAPACITY, Band
from mbnetsim.lightpath import Lightpath, LightpathRequest, Role
from mbnetsim.metrics import ScenarioMetrics
from mbnetsim.protection import (
    AvailabilityConfig,
    ProtectionMode,
    ProtectionRecord,
    ProtectionState,
    needs_backup,
    path_availability,
    provision_backup,
    share_factor,
    switchover,
)
from mbnetsim.qot import QotParams, path_gosnr
from mbnetsim.routing import Graph, Path, k_shortest_paths, link_disjoint_path
from mbnetsim.spectrum import SpectrumPolicy, alloc_width, allocate, first_fit, release
from mbnetsim.topology import Network, remove_edges

log = logging.getLogger(__name__)

BLOCK_NO_SPECTRUM = "no-spectrum-or-qot"
BLOCK_NO_PROTECTION = "no-protection"


class BackupPolicy(str, Enum):
    """What to do when a backup is required but cannot be provisioned."""

    BLOCK = "block"
    ADMIT_UNPROTECTED = "admit-unprotected"

    @classmethod
    def parse(cls, value: str | BackupPolicy) -> BackupPolicy:
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown backup policy {value!r}; expected block or admit-unprotected") from None


class UnknownLightpath(KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class EdgeAlreadyFailed(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    working_bands: tuple[Band, ...] = (Band.C, Band.L)
    protection: ProtectionMode = ProtectionMode.SHARED

    def __post_init__(self) -> None:
        bands = tuple(Band.parse(b) for b in self.working_bands)
        if not bands:
            raise ValueError(f"scenario {self.name!r} has no working band")
        if bands not in ((Band.C,), (Band.C, Band.L)):
            raise ValueError(f"scenario {self.name!r}: working bands must be [C] or [C, L], got {[b.value for b in bands]}")
        object.__setattr__(self, "working_bands", bands)
        object.__setattr__(self, "protection", ProtectionMode.parse(self.protection))


BUILTIN_SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario("c-only", (Band.C,), ProtectionMode.NONE),
        Scenario("c+l", (Band.C, Band.L), ProtectionMode.NONE),
        Scenario("c+l+s-shared", (Band.C, Band.L), ProtectionMode.SHARED),
        Scenario("c+l+s-dedicated", (Band.C, Band.L), ProtectionMode.DEDICATED),
    )
}


@dataclass(frozen=True)
class TrafficModel:
    """Poisson arrivals, exponential holding times, uniform pairs and demands."""

    load_erlang: float
    mean_holding: float = 1.0
    slots_min: int = 2
    slots_max: int = 8
    k: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.load_erlang > 0:
            raise ValueError(f"load_erlang must be > 0, got {self.load_erlang}")
        if not self.mean_holding > 0:
            raise ValueError(f"mean_holding must be > 0, got {self.mean_holding}")
        if not 1 <= self.slots_min <= self.slots_max:
            raise ValueError(f"need 1 <= slots_min <= slots_max, got [{self.slots_min}, {self.slots_max}]")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @property
    def arrival_rate(self) -> float:
        return self.load_erlang / self.mean_holding


@dataclass(frozen=True)
class FailureModel:
    """Random single-link cuts: Poisson with ``rate`` per time unit, exponential repair."""

    rate: float = 0.0
    mean_repair: float = 1.0

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError(f"failure rate must be >= 0, got {self.rate}")
        if not self.mean_repair > 0:
            raise ValueError(f"mean_repair must be > 0, got {self.mean_repair}")


@dataclass
class Decision:
    accepted: bool
    working: Lightpath | None = None
    backup: Lightpath | None = None
    reason: str | None = None
    a_w: float | None = None


@dataclass(frozen=True)
class FailureReport:
    edge: int
    affected: frozenset[int]
    restored: frozenset[int]
    lost: frozenset[int]

    def __str__(self) -> str:
        def ids(s: frozenset[int]) -> str:
            return ",".join(map(str, sorted(s))) or "-"

        return (
            f"edge={self.edge} affected={len(self.affected)} restored={len(self.restored)} lost={len(self.lost)}\n"
            f"  restored ids: {ids(self.restored)}\n"
            f"  lost ids: {ids(self.lost)}"
        )


@dataclass
class SimState:
    net: Network
    scenario: Scenario = field(default_factory=lambda: BUILTIN_SCENARIOS["c+l+s-shared"])
    policy: SpectrumPolicy = field(default_factory=SpectrumPolicy)
    params: QotParams = field(default_factory=QotParams)
    availability: AvailabilityConfig = field(default_factory=AvailabilityConfig)
    backup_policy: BackupPolicy = BackupPolicy.BLOCK
    protection: ProtectionState = field(init=False)
    failed: set[int] = field(default_factory=set)

    def __post_init__(self) -> None:
        self.protection = ProtectionState(self.scenario.protection)
        self._ids = itertools.count()
        self._paths: dict[tuple, list[Path]] = {}

    def new_id(self) -> int:
        return next(self._ids)

    def graph(self) -> Graph:
        return remove_edges(self.net, self.failed) if self.failed else self.net

    def candidate_paths(self, s: int, d: int, k: int) -> list[Path]:
        key = (s, d, k, frozenset(self.failed))
        paths = self._paths.get(key)
        if paths is None:
            paths = self._paths[key] = k_shortest_paths(self.graph(), s, d, k)
        return paths

    def backup_candidates(self, working: Path, k: int) -> list[Path]:
        key = ("disjoint", working.edges, working.source, k, frozenset(self.failed))
        paths = self._paths.get(key)
        if paths is None:
            paths = self._paths[key] = link_disjoint_path(self.graph(), working, k)
        return paths

    @property
    def records(self) -> dict[int, ProtectionRecord]:
        return self.protection.records

    def snapshot(self) -> tuple:
        """Comparable image of all mutable network and protection state."""
        recs = tuple(
            (wid, r.working, r.backup, r.active_path) for wid, r in sorted(self.protection.records.items())
        )
        table = frozenset(self.protection.table.items())
        return (self.net.occupancy.snapshot(), recs, table, frozenset(self.failed))


def admit(state: SimState, request: LightpathRequest) -> Decision:
    """Route, assign spectrum and (when needed) protect one request."""
    net = state.graph()
    width = alloc_width(request.requested_slots, state.policy)
    working = None
    for path in state.candidate_paths(request.s, request.d, request.k):
        for band in state.scenario.working_bands:
            rng = first_fit(net, path, band, width)
            if rng is None:
                continue
            if not path_gosnr(path, band, state.params, request.m).acceptable:
                continue
            wid = state.new_id()
            allocate(net, path, band, rng, wid)
            working = Lightpath(wid, path, band, rng, Role.WORKING)
            break
        if working is not None:
            break
    if working is None:
        return Decision(False, reason=BLOCK_NO_SPECTRUM)

    a_w = path_availability(net, working.path)
    backup = None
    if state.scenario.protection is not ProtectionMode.NONE and needs_backup(a_w, state.availability):
        backup = provision_backup(
            net,
            working,
            request,
            state.protection,
            state.policy,
            state.params,
            state.new_id(),
            state.backup_candidates(working.path, request.k),
        )
        if backup is None and state.backup_policy is BackupPolicy.BLOCK:
            release(net, working.id)
            return Decision(False, reason=BLOCK_NO_PROTECTION, a_w=a_w)
    state.protection.register(ProtectionRecord(working, backup, a_w))
    return Decision(True, working, backup, a_w=a_w)


def _teardown(state: SimState, working_id: int) -> ProtectionRecord:
    record = state.protection.discard(working_id)
    release(state.net, record.working.id)
    if record.backup is not None:
        release(state.net, record.backup.id)
    return record


def depart(state: SimState, working_id: int) -> ProtectionRecord:
    """Release a working lightpath and its backup reservation."""
    if working_id not in state.protection.records:
        raise UnknownLightpath(f"no active lightpath with id {working_id}")
    return _teardown(state, working_id)


def inject_failure(state: SimState, edge: int) -> FailureReport:
    """Cut ``edge``: switch affected protected lightpaths to their backups, drop the rest."""
    state.net.edge(edge)
    if edge in state.failed:
        raise EdgeAlreadyFailed(f"edge {edge} is already failed")
    state.failed.add(edge)
    restored, lost = switchover(state.protection.records.values(), edge, state.failed, state.protection.table)
    for wid in sorted(lost):
        _teardown(state, wid)
    return FailureReport(edge, frozenset(restored | lost), frozenset(restored), frozenset(lost))


def repair(state: SimState, edge: int) -> None:
    """Return ``edge`` to service. Lightpaths running on backups stay there."""
    state.failed.discard(edge)


Hook = Callable[[SimState, str, object], None]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def run(
    net: Network,
    traffic: TrafficModel,
    scenario: Scenario,
    policy: SpectrumPolicy | None = None,
    params: QotParams | None = None,
    availability: AvailabilityConfig | None = None,
    n_requests: int = 10_000,
    backup_policy: BackupPolicy = BackupPolicy.BLOCK,
    failures: FailureModel | None = None,
    event_log: TextIO | None = None,
    hook: Hook | None = None,
) -> ScenarioMetrics:
    """Simulate ``n_requests`` dynamic arrivals on a fresh copy of ``net``.

    The request stream depends only on ``traffic`` (including its seed), so
    scenarios run with the same seed see the same requests. Utilization is
    time-averaged over [0, last arrival].
    """
    if n_requests < 1:
        raise ValueError(f"n_requests must be >= 1, got {n_requests}")
    t0 = time.perf_counter()
    state = SimState(
        Network(net.nodes, net.edges),
        scenario,
        policy or SpectrumPolicy(),
        params or QotParams(),
        availability or AvailabilityConfig(),
        BackupPolicy.parse(backup_policy),
    )
    failures = failures or FailureModel()
    traffic_seq, failure_seq = np.random.SeedSequence(traffic.seed).spawn(2)
    rng = np.random.default_rng(traffic_seq)
    frng = np.random.default_rng(failure_seq)

    n_nodes = len(net.nodes)
    if n_nodes < 2:
        raise ValueError("network needs at least two nodes")
    arrivals = np.cumsum(rng.exponential(1.0 / traffic.arrival_rate, n_requests))
    holding = rng.exponential(traffic.mean_holding, n_requests)
    pair = rng.integers(0, n_nodes * (n_nodes - 1), n_requests)
    slots = rng.integers(traffic.slots_min, traffic.slots_max + 1, n_requests)
    horizon = float(arrivals[-1])

    seq = itertools.count()
    events: list[tuple] = []

    def push(t: float, kind: str, payload: int) -> None:
        heapq.heappush(events, (t, next(seq), kind, payload))

    for i, t in enumerate(arrivals):
        push(float(t), "arrival", i)
    if failures.rate > 0:
        push(float(frng.exponential(1.0 / failures.rate)), "failure", -1)

    def emit(t: float, text: str) -> None:
        if event_log is not None:
            event_log.write(f"t={_fmt(t)} {text}\n")

    bands = (Band.C, Band.L, Band.S)
    denom = {b: BAND_CAPACITY[b] * len(net.edges) for b in bands}
    area = dict.fromkeys(bands, 0.0)
    peak = dict.fromkeys(bands, 0.0)
    share_samples: list[float] = []
    blocked = 0
    affected = restored = 0
    request_of: dict[int, int] = {}
    t_prev = 0.0

    while events:
        t, _, kind, payload = heapq.heappop(events)
        if t_prev < horizon:
            dt = min(t, horizon) - t_prev
            for b in bands:
                area[b] += state.net.occupancy.occupied_units(b) / denom[b] * dt
        t_prev = t

        info: object = None
        if kind == "arrival":
            i = payload
            a, rem = divmod(int(pair[i]), n_nodes - 1)
            d = rem if rem < a else rem + 1
            req = LightpathRequest(a, d, int(slots[i]), traffic.k)
            emit(t, f"ARRIVE id={i} s={a} d={d} slots={req.requested_slots}")
            info = dec = admit(state, req)
            if dec.accepted:
                w = dec.working
                request_of[w.id] = i
                emit(t, f"ACCEPT id={i} band={w.band.value} start={w.range.start} width={w.range.width} aw={_fmt(dec.a_w)}")
                if dec.backup is not None:
                    b = dec.backup
                    emit(t, f"BACKUP id={i} start={b.range.start} width={b.range.width}")
                    share_samples.append(share_factor(state.protection, state.net.occupancy.occupied_units(Band.S)))
                push(t + float(holding[i]), "departure", w.id)
            else:
                blocked += 1
                emit(t, f"BLOCK id={i} reason={dec.reason}")
        elif kind == "departure":
            if payload in state.protection.records:
                depart(state, payload)
                emit(t, f"DEPART id={request_of.pop(payload)}")
            else:
                # already dropped by a failure
                request_of.pop(payload, None)
                kind = "stale"
        elif kind == "failure":
            up = [e.id for e in state.net.edges if e.id not in state.failed]
            if up:
                edge = up[int(frng.integers(len(up)))]
                emit(t, f"FAIL edge={edge}")
                info = report = inject_failure(state, edge)
                affected += len(report.affected)
                restored += len(report.restored)
                for wid in report.lost:
                    request_of.pop(wid, None)
                push(t + float(frng.exponential(failures.mean_repair)), "repair", edge)
            nxt = t + float(frng.exponential(1.0 / failures.rate))
            if nxt <= horizon:
                push(nxt, "failure", -1)
        elif kind == "repair":
            repair(state, payload)
            emit(t, f"REPAIR edge={payload}")

        if t <= horizon:
            for b in bands:
                peak[b] = max(peak[b], state.net.occupancy.occupied_units(b) / denom[b])
        if hook is not None:
            hook(state, kind, info)

    mean = {b: area[b] / horizon if horizon > 0 else 0.0 for b in bands}
    if failures.rate > 0:
        restorability = restored / affected if affected else 1.0
    else:
        restorability = None
    metrics = ScenarioMetrics(
        scenario=scenario.name,
        load_erlang=traffic.load_erlang,
        seed=traffic.seed,
        offered=n_requests,
        blocked=blocked,
        blocking_probability=blocked / n_requests,
        util_C_mean=mean[Band.C],
        util_L_mean=mean[Band.L],
        util_S_mean=mean[Band.S],
        util_C_peak=peak[Band.C],
        util_L_peak=peak[Band.L],
        util_S_peak=peak[Band.S],
        backup_share_factor=float(np.mean(share_samples)) if share_samples else 1.0,
        restorability=restorability,
        runtime_s=time.perf_counter() - t0,
    )
    log.info(
        "%s load=%g seed=%d: blocked %d/%d (%.4f)",
        scenario.name, traffic.load_erlang, traffic.seed, blocked, n_requests, metrics.blocking_probability,
    )
    return metrics


def admit_all(state: SimState, requests: Iterable[LightpathRequest]) -> list[Decision]:
    return [admit(state, r) for r in requests]
