"""Run-configuration loading and validation.

A run config is a TOML document. Only ``topology`` and a sweep with at least
one scenario and one load are required; every other field has a default.
Paths inside the file are resolved relative to the file's directory::

    topology = "nsfnet.json"
    output = "results.csv"

    [sweep]
    scenarios = ["c-only", "c+l", {name = "mine", bands = ["C", "L"], protection = "s-band-shared"}]
    loads = [100, 200, 300]
    requests = 10000
    seeds = [1, 2, 3]

    [traffic]           # mean_holding, slots_min, slots_max, k
    [failures]          # rate, mean_repair
    [spectrum]          # guard_band_slots
    [qot]               # span_length_km, per_band_span_gosnr_db, threshold_db
    [availability]      # a_th, alpha_per_km
    [protection]        # mode (default for inline scenarios), policy
    [failure_demo]      # scenario, load, requests, seed
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from mbnetsim.bands import Band
from mbnetsim.engine import BUILTIN_SCENARIOS, BackupPolicy, FailureModel, Scenario, TrafficModel
from mbnetsim.protection import AvailabilityConfig, ProtectionMode
from mbnetsim.qot import QotParams
from mbnetsim.reporting import SweepSpec
from mbnetsim.spectrum import SpectrumPolicy
from mbnetsim.topology import DEFAULT_ALPHA_PER_KM


class ConfigNotFound(FileNotFoundError):
    def __str__(self) -> str:
        return f"config not found: {self.filename}"


class ConfigParseError(ValueError):
    pass


class ConfigError(ValueError):
    """A field is missing, mistyped or out of bounds."""

    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class FailureDemo:
    scenario: str = "c+l+s-shared"
    load_erlang: float = 200.0
    requests: int = 300
    seed: int = 1


@dataclass(frozen=True)
class RunConfig:
    topology: FsPath
    sweep: SweepSpec
    traffic: TrafficModel = field(default_factory=lambda: TrafficModel(load_erlang=1.0))
    spectrum: SpectrumPolicy = field(default_factory=SpectrumPolicy)
    qot: QotParams = field(default_factory=QotParams)
    availability: AvailabilityConfig = field(default_factory=AvailabilityConfig)
    alpha_per_km: float = DEFAULT_ALPHA_PER_KM
    backup_policy: BackupPolicy = BackupPolicy.BLOCK
    failures: FailureModel = field(default_factory=FailureModel)
    output: FsPath = FsPath("results.csv")
    event_log: FsPath | None = None
    workers: int = 1
    failure_demo: FailureDemo = field(default_factory=FailureDemo)


_SECTIONS = {
    "traffic": {"mean_holding", "slots_min", "slots_max", "k"},
    "failures": {"rate", "mean_repair"},
    "spectrum": {"guard_band_slots"},
    "qot": {"span_length_km", "per_band_span_gosnr_db", "threshold_db"},
    "availability": {"a_th", "alpha_per_km"},
    "protection": {"mode", "policy"},
    "failure_demo": {"scenario", "load", "requests", "seed"},
    "sweep": {"scenarios", "loads", "requests", "seeds"},
}
_TOP = {"topology", "output", "event_log", "workers", "seed"} | set(_SECTIONS)


def _section(doc: Mapping[str, Any], name: str) -> dict[str, Any]:
    sec = doc.get(name, {})
    if not isinstance(sec, Mapping):
        raise ConfigError(name, "must be a table")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}", "unknown field")
    return dict(sec)


def _num(sec: Mapping[str, Any], key: str, where: str, default: float) -> float:
    value = sec.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}.{key}", f"must be a finite number, got {value!r}")
    return float(value)


def _int(sec: Mapping[str, Any], key: str, where: str, default: int, minimum: int | None = None) -> int:
    value = sec.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key}", f"must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _build(where: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _scenario(entry: Any, i: int, default_mode: ProtectionMode) -> Scenario:
    where = f"sweep.scenarios[{i}]"
    if isinstance(entry, str):
        if entry not in BUILTIN_SCENARIOS:
            raise ConfigError(where, f"unknown scenario {entry!r}; built-ins are {', '.join(BUILTIN_SCENARIOS)}")
        return BUILTIN_SCENARIOS[entry]
    if not isinstance(entry, Mapping) or "name" not in entry:
        raise ConfigError(where, "must be a built-in name or a table with 'name'")
    unknown = set(entry) - {"name", "bands", "protection"}
    if unknown:
        raise ConfigError(f"{where}.{sorted(unknown)[0]}", "unknown field")
    bands = entry.get("bands", ["C", "L"])
    if not isinstance(bands, list):
        raise ConfigError(f"{where}.bands", "must be a list")
    try:
        bands = tuple(Band.parse(b) for b in bands)
    except ValueError as exc:
        raise ConfigError(f"{where}.bands", str(exc)) from None
    return _build(where, Scenario, name=str(entry["name"]), working_bands=bands,
                  protection=entry.get("protection", default_mode))


def parse_config(doc: Mapping[str, Any], base_dir: FsPath = FsPath("."), seed: int | None = None) -> RunConfig:
    """Validate a parsed document and fill defaults. ``seed`` replaces the sweep seeds."""
    unknown = set(doc) - _TOP
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    if "topology" not in doc:
        raise ConfigError("topology", "required")
    if not isinstance(doc["topology"], str):
        raise ConfigError("topology", "must be a path string")
    topology = base_dir / doc["topology"]
    if not topology.is_file():
        raise ConfigError("topology", f"file not found: {topology}")

    prot = _section(doc, "protection")
    try:
        default_mode = ProtectionMode.parse(prot.get("mode", ProtectionMode.SHARED.value))
    except ValueError as exc:
        raise ConfigError("protection.mode", str(exc)) from None
    try:
        backup_policy = BackupPolicy.parse(prot.get("policy", BackupPolicy.BLOCK.value))
    except ValueError as exc:
        raise ConfigError("protection.policy", str(exc)) from None

    sw = _section(doc, "sweep")
    scen = sw.get("scenarios")
    if not isinstance(scen, list) or not scen:
        raise ConfigError("sweep.scenarios", "need a non-empty list")
    scenarios = tuple(_scenario(e, i, default_mode) for i, e in enumerate(scen))
    loads = sw.get("loads")
    if not isinstance(loads, list) or not loads:
        raise ConfigError("sweep.loads", "need a non-empty list")
    for i, x in enumerate(loads):
        _num({"v": x}, "v", f"sweep.loads[{i}]", 0.0)
    seeds = sw.get("seeds", [doc.get("seed", 1)])
    if not isinstance(seeds, list) or any(isinstance(s, bool) or not isinstance(s, int) for s in seeds):
        raise ConfigError("sweep.seeds", "must be a list of integers")
    if seed is not None:
        seeds = [seed]
    sweep = _build(
        "sweep", SweepSpec, scenarios=scenarios, loads=tuple(loads),
        requests=_int(sw, "requests", "sweep", 10_000, 1), seeds=tuple(seeds),
    )

    tr = _section(doc, "traffic")
    traffic = _build(
        "traffic", TrafficModel, load_erlang=sweep.loads[0],
        mean_holding=_num(tr, "mean_holding", "traffic", 1.0),
        slots_min=_int(tr, "slots_min", "traffic", 2, 1),
        slots_max=_int(tr, "slots_max", "traffic", 8, 1),
        k=_int(tr, "k", "traffic", 3, 1),
        seed=sweep.seeds[0],
    )

    fl = _section(doc, "failures")
    failures = _build("failures", FailureModel, rate=_num(fl, "rate", "failures", 0.0),
                      mean_repair=_num(fl, "mean_repair", "failures", 1.0))

    sp = _section(doc, "spectrum")
    spectrum = _build("spectrum.guard_band_slots", SpectrumPolicy,
                      guard_band_slots=_int(sp, "guard_band_slots", "spectrum", 1, 0))

    q = _section(doc, "qot")
    span_db = q.get("per_band_span_gosnr_db", {})
    thr = q.get("threshold_db", {})
    if not isinstance(span_db, Mapping):
        raise ConfigError("qot.per_band_span_gosnr_db", "must be a table")
    if not isinstance(thr, Mapping):
        raise ConfigError("qot.threshold_db", "must be a table keyed by modulation level")
    span_values = dict(QotParams().per_band_span_gosnr_db)
    for key in span_db:
        try:
            band = Band.parse(key)
        except ValueError as exc:
            raise ConfigError(f"qot.per_band_span_gosnr_db.{key}", str(exc)) from None
        span_values[band] = _num(span_db, key, "qot.per_band_span_gosnr_db", 0.0)
    thresholds = dict(QotParams().threshold_db)
    for key in thr:
        try:
            level = int(key)
        except ValueError:
            raise ConfigError(f"qot.threshold_db.{key}", "keys must be modulation levels") from None
        thresholds[level] = _num(thr, key, "qot.threshold_db", 0.0)
    qot = _build("qot", QotParams, span_length_km=_num(q, "span_length_km", "qot", 80.0),
                 per_band_span_gosnr_db=span_values, threshold_db=thresholds)

    av = _section(doc, "availability")
    availability = _build("availability.a_th", AvailabilityConfig, a_th=_num(av, "a_th", "availability", 0.999))
    alpha = _num(av, "alpha_per_km", "availability", DEFAULT_ALPHA_PER_KM)
    if alpha < 0:
        raise ConfigError("availability.alpha_per_km", f"must be >= 0, got {alpha}")

    fd = _section(doc, "failure_demo")
    demo_name = fd.get("scenario", "c+l+s-shared")
    known = {s.name for s in scenarios} | set(BUILTIN_SCENARIOS)
    if demo_name not in known:
        raise ConfigError("failure_demo.scenario", f"unknown scenario {demo_name!r}")
    demo_load = _num(fd, "load", "failure_demo", 200.0)
    if not demo_load > 0:
        raise ConfigError("failure_demo.load", "must be > 0")
    demo = FailureDemo(demo_name, demo_load, _int(fd, "requests", "failure_demo", 300, 1),
                       _int(fd, "seed", "failure_demo", sweep.seeds[0]))

    output = doc.get("output", "results.csv")
    if not isinstance(output, str):
        raise ConfigError("output", "must be a path string")
    event_log = doc.get("event_log")
    if event_log is not None and not isinstance(event_log, str):
        raise ConfigError("event_log", "must be a path string")

    return RunConfig(
        topology=topology,
        sweep=sweep,
        traffic=traffic,
        spectrum=spectrum,
        qot=qot,
        availability=availability,
        alpha_per_km=alpha,
        backup_policy=backup_policy,
        failures=failures,
        output=base_dir / output,
        event_log=None if event_log is None else base_dir / event_log,
        workers=_int(doc, "workers", "workers", 1, 1),
        failure_demo=demo,
    )


def load_config(path: str | FsPath, seed: int | None = None) -> RunConfig:
    path = FsPath(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ConfigNotFound(2, "config not found", str(path)) from None
    try:
        doc = tomllib.loads(raw.decode())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"cannot parse {path}: {exc}") from None
    return parse_config(doc, path.parent, seed)


def scenario_by_name(cfg: RunConfig, name: str) -> Scenario:
    for s in cfg.sweep.scenarios:
        if s.name == name:
            return s
    return BUILTIN_SCENARIOS[name]
