"""Scenario sweeps, CSV output and per-point summaries."""

from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path as FsPath
from typing import Iterable, Sequence, TextIO

from mbnetsim.engine import BackupPolicy, FailureModel, Scenario, TrafficModel, run
from mbnetsim.metrics import ScenarioMetrics
from mbnetsim.protection import AvailabilityConfig
from mbnetsim.qot import QotParams
from mbnetsim.spectrum import SpectrumPolicy
from mbnetsim.topology import Network

CSV_HEADER = (
    "scenario,load_erlang,seed,offered,blocked,blocking_probability,"
    "util_C_mean,util_L_mean,util_S_mean,util_C_peak,util_L_peak,util_S_peak,"
    "backup_share_factor,restorability,runtime_s"
)
COLUMNS = CSV_HEADER.split(",")
_INT_COLUMNS = {"seed", "offered", "blocked"}

assert COLUMNS == ScenarioMetrics.columns()


@dataclass(frozen=True)
class SweepSpec:
    scenarios: tuple[Scenario, ...]
    loads: tuple[float, ...]
    requests: int = 10_000
    seeds: tuple[int, ...] = (1,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "loads", tuple(float(x) for x in self.loads))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.scenarios:
            raise ValueError("sweep needs at least one scenario")
        if not self.loads:
            raise ValueError("sweep needs at least one load")
        if not self.seeds:
            raise ValueError("sweep needs at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("sweep seeds must be distinct")
        if len({s.name for s in self.scenarios}) != len(self.scenarios):
            raise ValueError("sweep scenario names must be distinct")
        if any(not x > 0 for x in self.loads):
            raise ValueError("sweep loads must be > 0")
        if self.requests < 1:
            raise ValueError("requests per point must be >= 1")

    def points(self) -> list[tuple[Scenario, float, int]]:
        return [(sc, load, seed) for sc in self.scenarios for load in self.loads for seed in self.seeds]


def _run_point(args: tuple) -> ScenarioMetrics:
    net, sc, traffic, policy, params, availability, requests, backup_policy, failures = args
    return run(net, traffic, sc, policy, params, availability, requests, backup_policy, failures)


def run_sweep(
    net: Network,
    spec: SweepSpec,
    traffic: TrafficModel | None = None,
    policy: SpectrumPolicy | None = None,
    params: QotParams | None = None,
    availability: AvailabilityConfig | None = None,
    backup_policy: BackupPolicy = BackupPolicy.BLOCK,
    failures: FailureModel | None = None,
    workers: int = 1,
    event_log: TextIO | None = None,
) -> list[ScenarioMetrics]:
    """One :class:`ScenarioMetrics` per (scenario, load, seed), in that nesting order.

    ``traffic`` supplies everything except load and seed. Points run in a
    process pool when ``workers > 1``; an event log forces serial execution.
    """
    base = traffic or TrafficModel(load_erlang=1.0)
    jobs = [
        (net, sc, replace(base, load_erlang=load, seed=seed), policy, params, availability,
         spec.requests, backup_policy, failures)
        for sc, load, seed in spec.points()
    ]
    if event_log is not None:
        rows = []
        for _, sc, tm, *_rest in jobs:
            event_log.write(f"# scenario={sc.name} load={tm.load_erlang:g} seed={tm.seed}\n")
            rows.append(
                run(net, tm, sc, policy, params, availability, spec.requests, backup_policy, failures,
                    event_log=event_log)
            )
        return rows
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_point, jobs))
    return [_run_point(job) for job in jobs]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def format_row(row: ScenarioMetrics) -> list[str]:
    return [_format(getattr(row, c)) for c in COLUMNS]


def write_csv(rows: Sequence[ScenarioMetrics], path: str | FsPath | TextIO) -> None:
    """Write ``rows`` with the fixed header; numbers use up to 12 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    if hasattr(path, "write"):
        _write(rows, path)
        return
    with open(path, "w", newline="") as fh:
        _write(rows, fh)


def _write(rows: Sequence[ScenarioMetrics], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(format_row(row))


def read_csv(path: str | FsPath) -> list[ScenarioMetrics]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}")
        rows = []
        for rec in reader:
            values = {}
            for col, text in zip(COLUMNS, rec):
                if col == "scenario":
                    values[col] = text
                elif text == "":
                    values[col] = None
                elif col in _INT_COLUMNS:
                    values[col] = int(text)
                else:
                    values[col] = float(text)
            rows.append(ScenarioMetrics(**values))
    return rows


@dataclass(frozen=True)
class Summary:
    scenario: str
    load_erlang: float
    n_seeds: int
    bp_mean: float
    bp_std: float


def summarize(rows: Iterable[ScenarioMetrics]) -> list[Summary]:
    """Mean and sample standard deviation of blocking probability per (scenario, load)."""
    groups: dict[tuple[str, float], list[float]] = {}
    for r in rows:
        groups.setdefault((r.scenario, r.load_erlang), []).append(r.blocking_probability)
    if not groups:
        raise ValueError("no rows to summarize")
    out = []
    for (name, load), bps in groups.items():
        std = statistics.stdev(bps) if len(bps) > 1 else 0.0
        out.append(Summary(name, load, len(bps), statistics.fmean(bps), std))
    return out


def format_summary(summaries: Iterable[Summary]) -> str:
    lines = [f"{'scenario':<18} {'load':>8} {'seeds':>5} {'BP mean':>10} {'BP std':>10}"]
    for s in summaries:
        lines.append(f"{s.scenario:<18} {s.load_erlang:>8g} {s.n_seeds:>5d} {s.bp_mean:>10.5f} {s.bp_std:>10.5f}")
    return "\n".join(lines)


def rows_equal(a: ScenarioMetrics, b: ScenarioMetrics, sig: int = 12) -> bool:
    """Field-wise equality at ``sig`` significant digits, runtime excluded."""
    for col in COLUMNS:
        if col == "runtime_s":
            continue
        x, y = getattr(a, col), getattr(b, col)
        if isinstance(x, float) and isinstance(y, float):
            if format(x, f".{sig}g") != format(y, f".{sig}g") and not (math.isnan(x) and math.isnan(y)):
                return False
        elif x != y:
            return False
    return True
