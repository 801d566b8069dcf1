"""Network graph, per-edge availability and topology-document ingestion.

Topology documents are JSON::

    {"nodes": [{"id": 0, "name": "A"}, ...],
     "edges": [{"id": 0, "u": 0, "v": 1, "length_km": 300.0, "availability": 0.999}]}

``availability`` is optional; when absent it is derived from the fiber length
as ``1 - alpha * length_km`` (see :func:`default_availability`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path as FsPath
from typing import Any, Iterable, Iterator, Mapping

from mbnetsim.bands import BAND_CAPACITY, Band
from mbnetsim.spectrum import Occupancy

DEFAULT_ALPHA_PER_KM = 1e-5
# Smallest availability the length model may produce; keeps A strictly positive.
MIN_AVAILABILITY = 1e-9


class TopologyError(ValueError):
    """Malformed or inconsistent topology document."""


@dataclass(frozen=True)
class Node:
    id: int
    name: str = ""


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    length_km: float
    availability: float

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset((self.u, self.v))

    def other(self, node: int) -> int:
        if node == self.u:
            return self.v
        if node == self.v:
            return self.u
        raise ValueError(f"node {node} is not an endpoint of edge {self.id}")


def default_availability(length_km: float, alpha_per_km: float = DEFAULT_ALPHA_PER_KM) -> float:
    """Linear length proxy ``1 - alpha * L`` clamped into (0, 1]."""
    return min(1.0, max(MIN_AVAILABILITY, 1.0 - alpha_per_km * length_km))


class _GraphQueries:
    """Read-only graph interface shared by :class:`Network` and :class:`NetworkView`."""

    def has_node(self, node: int) -> bool:
        return 0 <= node < len(self.nodes)

    def edge(self, edge_id: int) -> Edge:
        try:
            return self._edge_by_id()[edge_id]
        except KeyError:
            raise KeyError(f"unknown edge id {edge_id}") from None

    def incident(self, node: int) -> Iterator[Edge]:
        raise NotImplementedError

    def neighbors(self, node: int) -> Iterator[tuple[Edge, int]]:
        for e in self.incident(node):
            yield e, e.other(node)

    def component_of(self, node: int) -> set[int]:
        seen = {node}
        stack = [node]
        while stack:
            for _, w in self.neighbors(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def connected(self, s: int, d: int) -> bool:
        return d in self.component_of(s)


@dataclass(eq=False)
class Network(_GraphQueries):
    """Undirected fiber graph with dense node ids and per-edge occupancy."""

    nodes: list[Node]
    edges: list[Edge]
    occupancy: Occupancy = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {e.id: e for e in self.edges}
        self._adj: dict[int, list[Edge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            self._adj[e.u].append(e)
            self._adj[e.v].append(e)
        self.occupancy = Occupancy([e.id for e in self.edges])

    @property
    def base(self) -> Network:
        return self

    @property
    def removed(self) -> frozenset[int]:
        return frozenset()

    def _edge_by_id(self) -> dict[int, Edge]:
        return self._by_id

    def incident(self, node: int) -> Iterator[Edge]:
        return iter(self._adj[node])

    @property
    def edge_ids(self) -> list[int]:
        return [e.id for e in self.edges]

    def slot_map(self, edge_id: int, band: Band):
        """Owner-count row of one edge in one band (read-only)."""
        self.edge(edge_id)
        row = self.occupancy.edge_ids.index(edge_id)
        return self.occupancy.owner_counts(band)[row]

    def to_document(self) -> dict[str, Any]:
        return {
            "nodes": [{"id": n.id, "name": n.name} for n in self.nodes],
            "edges": [
                {"id": e.id, "u": e.u, "v": e.v, "length_km": e.length_km, "availability": e.availability}
                for e in self.edges
            ],
        }

    def summary(self) -> str:
        return f"{len(self.nodes)} nodes, {len(self.edges)} edges"


@dataclass(frozen=True, eq=False)
class NetworkView(_GraphQueries):
    """A network with some edges hidden. Spectrum state is the base network's."""

    base: Network
    removed: frozenset[int]

    @property
    def nodes(self) -> list[Node]:
        return self.base.nodes

    @property
    def edges(self) -> list[Edge]:
        return [e for e in self.base.edges if e.id not in self.removed]

    @property
    def occupancy(self) -> Occupancy:
        return self.base.occupancy

    def _edge_by_id(self) -> dict[int, Edge]:
        return {i: e for i, e in self.base._by_id.items() if i not in self.removed}

    def edge(self, edge_id: int) -> Edge:
        if edge_id in self.removed:
            raise KeyError(f"edge {edge_id} is removed in this view")
        return self.base.edge(edge_id)

    def incident(self, node: int) -> Iterator[Edge]:
        return (e for e in self.base.incident(node) if e.id not in self.removed)


def remove_edges(net: Network | NetworkView, edges: Iterable[int]) -> NetworkView:
    """Read-only view of ``net`` without ``edges``; ``net`` itself is untouched."""
    edges = frozenset(edges)
    base = net.base
    for e in edges:
        base.edge(e)
    return NetworkView(base, net.removed | edges)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TopologyError(msg)


def _as_int(value: Any, what: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{what} must be an integer, got {value!r}")
    return value


def _as_real(value: Any, what: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value),
        f"{what} must be a finite number, got {value!r}",
    )
    return float(value)


def load_topology(doc: Mapping[str, Any] | str | FsPath, alpha_per_km: float = DEFAULT_ALPHA_PER_KM) -> Network:
    """Build a :class:`Network` from a parsed document or a JSON file path."""
    if isinstance(doc, (str, FsPath)):
        path = FsPath(doc)
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise FileNotFoundError(f"topology not found: {path}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"malformed topology JSON in {path}: line {exc.lineno}: {exc.msg}") from None
    _require(isinstance(doc, Mapping), "topology document must be a JSON object")
    _require(isinstance(doc.get("nodes"), list), "topology document needs a 'nodes' list")
    _require(isinstance(doc.get("edges"), list), "topology document needs an 'edges' list")

    raw_nodes = doc["nodes"]
    ids = []
    names = {}
    for i, n in enumerate(raw_nodes):
        _require(isinstance(n, Mapping) and "id" in n, f"nodes[{i}] must be an object with an 'id'")
        nid = _as_int(n["id"], f"nodes[{i}].id")
        ids.append(nid)
        names[nid] = str(n.get("name", ""))
    _require(len(set(ids)) == len(ids), "duplicate node id")
    _require(sorted(ids) == list(range(len(ids))), "node ids must be dense 0..|V|-1")
    nodes = [Node(i, names[i]) for i in range(len(ids))]

    edges = []
    seen = set()
    for i, e in enumerate(doc["edges"]):
        _require(isinstance(e, Mapping), f"edges[{i}] must be an object")
        for key in ("id", "u", "v", "length_km"):
            _require(key in e, f"edges[{i}] is missing '{key}'")
        eid = _as_int(e["id"], f"edges[{i}].id")
        _require(eid >= 0, f"edges[{i}].id must be non-negative")
        _require(eid not in seen, f"duplicate edge id {eid}")
        seen.add(eid)
        u = _as_int(e["u"], f"edges[{i}].u")
        v = _as_int(e["v"], f"edges[{i}].v")
        for end in (u, v):
            _require(0 <= end < len(nodes), f"edge {eid} references unknown node {end}")
        _require(u != v, f"edge {eid} is a self-loop")
        length = _as_real(e["length_km"], f"edges[{i}].length_km")
        _require(length > 0, f"edge {eid} has non-positive length {length}")
        if e.get("availability") is None:
            avail = default_availability(length, alpha_per_km)
        else:
            avail = _as_real(e["availability"], f"edges[{i}].availability")
            _require(0 < avail <= 1, f"edge {eid} availability {avail} outside (0, 1]")
        edges.append(Edge(eid, u, v, length, avail))
    return Network(nodes, edges)


def write_topology(net: Network, path: str | FsPath) -> None:
    FsPath(path).write_text(json.dumps(net.to_document(), indent=2) + "\n")


def bundled_topology_path(name: str = "nsfnet") -> FsPath:
    """Filesystem path of a topology shipped with the package."""
    return FsPath(str(resources.files("mbnetsim") / "data" / f"{name}.json"))


def nsfnet(alpha_per_km: float = DEFAULT_ALPHA_PER_KM) -> Network:
    return load_topology(bundled_topology_path("nsfnet"), alpha_per_km)


def working_capacity() -> int:
    return BAND_CAPACITY[Band.C] + BAND_CAPACITY[Band.L]
