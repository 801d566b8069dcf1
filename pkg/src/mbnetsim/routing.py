"""Shortest, k-shortest and link-disjoint path computation.

Paths are ranked by physical length, then hop count, then the edge-id
sequence (lexicographic). Lengths are summed exactly (as fractions of the
stored floats) so that ties are detected reliably and the order is a strict
total order on loop-free paths.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from mbnetsim.topology import Network, NetworkView, remove_edges

Graph = Network | NetworkView


class UnknownNode(KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    lengths_km: tuple[float, ...] = field(repr=False, compare=False)
    exact_cost: Fraction = field(repr=False, compare=False)

    @property
    def cost_km(self) -> float:
        return float(self.exact_cost)

    @property
    def hops(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    @property
    def edge_set(self) -> frozenset[int]:
        return frozenset(self.edges)

    def sort_key(self) -> tuple[Fraction, int, tuple[int, ...]]:
        return (self.exact_cost, len(self.edges), self.edges)

    def __lt__(self, other: Path) -> bool:
        return self.sort_key() < other.sort_key()


def path_from_edges(net: Graph, source: int, edges: Iterable[int]) -> Path:
    """Assemble a :class:`Path` by walking ``edges`` from ``source``."""
    nodes = [source]
    lengths = []
    edges = tuple(edges)
    for eid in edges:
        e = net.edge(eid)
        nodes.append(e.other(nodes[-1]))
        lengths.append(e.length_km)
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"edge sequence {edges} revisits a node")
    return Path(tuple(nodes), edges, tuple(lengths), _exact_sum(lengths))


def _exact_sum(lengths: Iterable[float]) -> Fraction:
    return sum((Fraction(x) for x in lengths), Fraction(0))


def _check_nodes(net: Graph, s: int, d: int) -> None:
    for n in (s, d):
        if not net.has_node(n):
            raise UnknownNode(f"unknown node id {n}")
    if s == d:
        raise ValueError("source and destination must differ")


def _dijkstra(
    net: Graph,
    s: int,
    d: int,
    banned_nodes: frozenset[int] | set[int] = frozenset(),
    banned_edges: frozenset[int] | set[int] = frozenset(),
) -> Path | None:
    # Labels are (cost, hops, edge tuple); extension by a common edge preserves
    # their order, so label-setting yields the minimum under the full ranking.
    best: dict[int, tuple] = {s: (Fraction(0), 0, ())}
    heap: list[tuple] = [(Fraction(0), 0, (), s, (s,), ())]
    done: set[int] = set()
    while heap:
        cost, hops, edges, node, nodes, lengths = heapq.heappop(heap)
        if node in done:
            continue
        if node == d:
            return Path(nodes, edges, lengths, cost)
        done.add(node)
        for e, w in net.neighbors(node):
            if w in done or w in banned_nodes or e.id in banned_edges:
                continue
            label = (cost + Fraction(e.length_km), hops + 1, edges + (e.id,))
            prev = best.get(w)
            if prev is None or label < prev:
                best[w] = label
                heapq.heappush(heap, (*label, w, nodes + (w,), lengths + (e.length_km,)))
    return None


def shortest_path(net: Graph, s: int, d: int) -> Path | None:
    """Minimum-length loop-free path from ``s`` to ``d``, or None if disconnected."""
    _check_nodes(net, s, d)
    return _dijkstra(net, s, d)


def k_shortest_paths(net: Graph, s: int, d: int, k: int) -> list[Path]:
    """Up to ``k`` loop-free paths in ranking order (Yen's algorithm)."""
    _check_nodes(net, s, d)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    first = _dijkstra(net, s, d)
    if first is None:
        return []
    accepted = [first]
    seen = {first.edges}
    candidates: list[tuple] = []
    while len(accepted) < k:
        last = accepted[-1]
        for i in range(len(last.edges)):
            spur = last.nodes[i]
            root_edges = last.edges[:i]
            banned_edges = {p.edges[i] for p in accepted if p.edges[:i] == root_edges}
            spur_path = _dijkstra(net, spur, d, set(last.nodes[:i]), banned_edges)
            if spur_path is None:
                continue
            root_lengths = last.lengths_km[:i]
            total = Path(
                last.nodes[:i] + spur_path.nodes,
                root_edges + spur_path.edges,
                root_lengths + spur_path.lengths_km,
                _exact_sum(root_lengths) + spur_path.exact_cost,
            )
            if total.edges not in seen:
                seen.add(total.edges)
                heapq.heappush(candidates, (total.sort_key(), total))
        if not candidates:
            break
        accepted.append(heapq.heappop(candidates)[1])
    return accepted


def link_disjoint_path(net: Graph, working: Path, k: int) -> list[Path]:
    """Up to ``k`` ranked paths between the ends of ``working`` sharing none of its edges."""
    return k_shortest_paths(remove_edges(net, working.edges), working.source, working.target, k)
