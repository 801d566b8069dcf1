"""Cut every edge of a topology in turn after a fixed warm-up and tabulate the outcome."""

import argparse
import copy
import sys

from mbnetsim.cli import demand_set
from mbnetsim.engine import BUILTIN_SCENARIOS, SimState, TrafficModel, admit, inject_failure
from mbnetsim.topology import bundled_topology_path, load_topology


def scan(net, scenario, load, requests, seed):
    state = SimState(net, scenario)
    decisions = [admit(state, r) for r in demand_set(len(net.nodes), TrafficModel(load, seed=seed), requests)]
    rows = []
    for e in net.edges:
        trial = copy.deepcopy(state)
        protected = {w for w, r in trial.records.items() if r.backup is not None and e.id in r.working.path.edges}
        rep = inject_failure(trial, e.id)
        rows.append((e, len(rep.affected), len(protected), len(rep.restored), len(rep.lost)))
    return decisions, rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--topology", default=str(bundled_topology_path()))
    ap.add_argument("--scenario", default="c+l+s-shared", choices=list(BUILTIN_SCENARIOS))
    ap.add_argument("--load", type=float, default=200.0)
    ap.add_argument("--requests", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    net = load_topology(args.topology)
    decisions, rows = scan(net, BUILTIN_SCENARIOS[args.scenario], args.load, args.requests, args.seed)
    print(f"{args.scenario}: admitted {sum(d.accepted for d in decisions)}/{len(decisions)}, "
          f"{sum(d.backup is not None for d in decisions)} protected")
    print(f"{'edge':>4} {'u-v':>7} {'km':>6} {'affected':>8} {'protected':>9} {'restored':>8} {'lost':>5}")
    tot = [0, 0, 0]
    for e, aff, prot, res, lost in rows:
        print(f"{e.id:>4} {f'{e.u}-{e.v}':>7} {e.length_km:>6g} {aff:>8} {prot:>9} {res:>8} {lost:>5}")
        tot[0] += aff
        tot[1] += prot
        tot[2] += res
    if tot[0]:
        print(f"overall restorability {tot[2] / tot[0]:.4f} ({tot[2]}/{tot[0]}); protected subset {tot[1]} affected")
    return 0


if __name__ == "__main__":
    sys.exit(main())
