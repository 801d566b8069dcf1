"""Command-line entry point.

    mbnetsim simulate --config run.toml [--out results.csv] [--seed N]
    mbnetsim validate --topology nsfnet.json
    mbnetsim failure-demo --config run.toml --edge 3

Diagnostics go to stderr; verbosity follows ``MBNETSIM_LOG`` (debug, info, off).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import nullcontext
from typing import Sequence

import numpy as np

from mbnetsim.config import ConfigError, ConfigNotFound, ConfigParseError, load_config, scenario_by_name
from mbnetsim.engine import SimState, TrafficModel, admit, inject_failure
from mbnetsim.lightpath import LightpathRequest
from mbnetsim.reporting import format_summary, run_sweep, summarize, write_csv
from mbnetsim.topology import TopologyError, load_topology

log = logging.getLogger("mbnetsim")

_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO, "warning": logging.WARNING, "off": logging.CRITICAL + 1}


def _setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("MBNETSIM_LOG", "warning").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(2, f"usage error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mbnetsim", description="Multi-band optical network simulator with S-band protection")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run the configured sweep and write a CSV")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", help="CSV path (overrides the config's output)")
    sim.add_argument("--seed", type=int, help="run a single seed instead of the configured list")

    val = sub.add_parser("validate", help="check a topology document")
    val.add_argument("--topology", required=True)

    demo = sub.add_parser("failure-demo", help="admit a fixed demand set, cut one edge, report")
    demo.add_argument("--config", required=True)
    demo.add_argument("--edge", type=int, required=True)
    return p


def _simulate(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    net = load_topology(cfg.topology, cfg.alpha_per_km)
    out = args.out or cfg.output
    log.info("topology %s: %s", cfg.topology, net.summary())
    ctx = open(cfg.event_log, "w") if cfg.event_log is not None else nullcontext()
    with ctx as fh:
        rows = run_sweep(
            net, cfg.sweep, cfg.traffic, cfg.spectrum, cfg.qot, cfg.availability,
            cfg.backup_policy, cfg.failures, cfg.workers, event_log=fh,
        )
    try:
        write_csv(rows, out)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc.strerror}", file=sys.stderr)
        return 1
    print(format_summary(summarize(rows)))
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _validate(args) -> int:
    net = load_topology(args.topology)
    components = set()
    for n in net.nodes:
        components.add(frozenset(net.component_of(n.id)))
    print(f"{args.topology}: {len(net.nodes)} nodes, {len(net.edges)} edges, {len(components)} component(s)")
    return 0


def demand_set(n_nodes: int, traffic: TrafficModel, count: int) -> list[LightpathRequest]:
    """Deterministic request list drawn from the traffic model's seed."""
    rng = np.random.default_rng(traffic.seed)
    out = []
    for _ in range(count):
        s, d = (int(x) for x in rng.choice(n_nodes, size=2, replace=False))
        slots = int(rng.integers(traffic.slots_min, traffic.slots_max + 1))
        out.append(LightpathRequest(s, d, slots, traffic.k))
    return out


def _failure_demo(args) -> int:
    cfg = load_config(args.config)
    net = load_topology(cfg.topology, cfg.alpha_per_km)
    try:
        net.edge(args.edge)
    except KeyError:
        print(f"error: unknown edge id {args.edge}", file=sys.stderr)
        return 1
    demo = cfg.failure_demo
    sc = scenario_by_name(cfg, demo.scenario)
    state = SimState(net, sc, cfg.spectrum, cfg.qot, cfg.availability, cfg.backup_policy)
    tm = TrafficModel(demo.load_erlang, cfg.traffic.mean_holding, cfg.traffic.slots_min,
                      cfg.traffic.slots_max, cfg.traffic.k, demo.seed)
    decisions = [admit(state, r) for r in demand_set(len(net.nodes), tm, demo.requests)]
    accepted = sum(d.accepted for d in decisions)
    protected = sum(d.backup is not None for d in decisions)
    print(f"scenario {sc.name}: admitted {accepted}/{len(decisions)} requests, {protected} protected")
    report = inject_failure(state, args.edge)
    print(f"failure report: {report}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    handlers = {"simulate": _simulate, "validate": _validate, "failure-demo": _failure_demo}
    try:
        return handlers[args.command](args)
    except ConfigNotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ConfigParseError as exc:
        print(f"error: config parse error: {exc}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: config error: {exc}", file=sys.stderr)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except TopologyError as exc:
        print(f"error: topology error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
