"""Physical topology: scenario-file parsing, hop distances, initial domains.

Distances are shortest-path hop counts with unit edge weights. Controllers
sit on graph nodes, so the distance between a switch and a controller is the
hop distance between their sites.
"""
from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .load_model import CapacityVector
from .errors import NoActiveController, NodeNotFound, ParseError, ValidationError

_DIGITS = re.compile(r"(\d+)")


def id_key(ident: str):
    """Natural sort key, so that ``c2`` orders before ``c10``."""
    return tuple(int(p) if p.isdigit() else p for p in _DIGITS.split(ident))


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @cached_property
    def adjacency(self) -> dict[str, list[str]]:
        adj = {n: [] for n in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    @cached_property
    def _bfs_cache(self) -> dict[str, dict[str, int]]:
        return {}

    def distances_from(self, source: str) -> dict[str, int]:
        """Hop count from ``source`` to every reachable node (BFS)."""
        if source not in self.adjacency:
            raise NodeNotFound(source)
        cached = self._bfs_cache.get(source)
        if cached is not None:
            return cached
        dist = {source: 0}
        queue = deque([source])
        adj = self.adjacency
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for v in adj[u]:
                if v not in dist:
                    dist[v] = du
                    queue.append(v)
        self._bfs_cache[source] = dist
        return dist

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        return len(self.distances_from(self.nodes[0])) == len(self.nodes)


def hop_distance(g: NetworkGraph, u: str, v: str) -> int:
    if v not in g.adjacency:
        raise NodeNotFound(v)
    return g.distances_from(u)[v]


@dataclass(frozen=True)
class ControllerSpec:
    id: str
    site: str
    capacity_cpu: float
    capacity_mem: float
    capacity_bw: float
    initially_active: bool = True

    @property
    def capacity(self) -> CapacityVector:
        return CapacityVector(self.capacity_cpu, self.capacity_mem, self.capacity_bw)


@dataclass(frozen=True)
class SwitchSpec:
    id: str
    site: str


@dataclass
class Topology:
    graph: NetworkGraph
    controllers: list[ControllerSpec]
    switches: list[SwitchSpec]
    name: str = ""
    extra: dict = field(default_factory=dict, repr=False)


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


def _positive_number(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{what}: capacity must be a number, got {value!r}")
    if not value > 0:
        raise ValidationError(f"{what}: capacity must be positive, got {value!r}")
    return float(value)


def topology_from_dict(doc: dict, name: str = "") -> Topology:
    """Validate the topology part of a scenario document."""
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    for key in ("nodes", "edges", "controllers", "switches"):
        if key not in doc:
            raise ParseError(f"missing top-level key '{key}'")
        if not isinstance(doc[key], list):
            raise ParseError(f"'{key}' must be an array")

    nodes = [str(n) for n in doc["nodes"]]
    _require(len(set(nodes)) == len(nodes), "duplicate node id")
    node_set = set(nodes)
    seen = set()
    edges = []
    for e in doc["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise ParseError(f"edge must be a pair, got {e!r}")
        u, v = str(e[0]), str(e[1])
        _require(u in node_set and v in node_set, f"edge ({u}, {v}) references unknown node")
        _require(u != v, f"self-loop edge at node {u}")
        key = frozenset((u, v))
        _require(key not in seen, f"duplicate edge ({u}, {v})")
        seen.add(key)
        edges.append((u, v))
    graph = NetworkGraph(tuple(nodes), tuple(edges))
    _require(graph.is_connected(), "graph not connected")

    controllers = []
    for c in doc["controllers"]:
        if not isinstance(c, dict) or "id" not in c or "site" not in c:
            raise ParseError(f"controller entry needs 'id' and 'site': {c!r}")
        cid = str(c["id"])
        cap = c.get("capacity")
        if not isinstance(cap, dict):
            raise ParseError(f"controller {cid}: 'capacity' must be an object with cpu/mem/bw")
        spec = ControllerSpec(
            id=cid,
            site=str(c["site"]),
            capacity_cpu=_positive_number(cap.get("cpu"), f"controller {cid} cpu"),
            capacity_mem=_positive_number(cap.get("mem"), f"controller {cid} mem"),
            capacity_bw=_positive_number(cap.get("bw"), f"controller {cid} bw"),
            initially_active=bool(c.get("active", True)),
        )
        _require(spec.site in node_set, f"controller {cid}: site {spec.site} is not a node")
        controllers.append(spec)
    ids = [c.id for c in controllers]
    _require(len(set(ids)) == len(ids), "duplicate controller id")
    _require(controllers, "scenario declares no controllers")

    switches = []
    for s in doc["switches"]:
        if not isinstance(s, dict) or "id" not in s or "site" not in s:
            raise ParseError(f"switch entry needs 'id' and 'site': {s!r}")
        sw = SwitchSpec(str(s["id"]), str(s["site"]))
        _require(sw.site in node_set, f"switch {sw.id}: site {sw.site} is not a node")
        switches.append(sw)
    sids = [s.id for s in switches]
    _require(len(set(sids)) == len(sids), "duplicate switch id")

    return Topology(graph, controllers, switches, name=name)


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ParseError(f"scenario file not found: {path}") from None
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def load_topology(path) -> tuple[NetworkGraph, list[ControllerSpec], list[SwitchSpec]]:
    topo = topology_from_dict(read_json(path), name=Path(path).stem)
    return topo.graph, topo.controllers, topo.switches


def assign_initial_domains(g: NetworkGraph, controllers, switches) -> dict[str, str]:
    """Map every switch to its nearest active controller (ties: lower id)."""
    active = sorted((c for c in controllers if c.initially_active), key=lambda c: id_key(c.id))
    if not active:
        raise NoActiveController("no active controller to assign switches to")
    tables = [(c.id, g.distances_from(c.site)) for c in active]
    assignment = {}
    for sw in switches:
        best = min(tables, key=lambda t: t[1][sw.site])  # min() keeps the first minimum
        assignment[sw.id] = best[0]
    return assignment


def import_graphml(path) -> dict:
    """Read node and edge elements of a GraphML file into the native grammar.

    Self-loops and parallel edges are dropped; attributes are ignored.
    """
    try:
        root = ET.parse(path).getroot()
    except (ET.ParseError, OSError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    nodes, edges, seen = [], [], set()
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "node":
            nodes.append(el.get("id"))
        elif tag == "edge":
            u, v = el.get("source"), el.get("target")
            key = frozenset((u, v))
            if u == v or key in seen:
                continue
            seen.add(key)
            edges.append([u, v])
    if not nodes:
        raise ParseError(f"{path}: no <node> elements")
    return {"nodes": nodes, "edges": edges, "controllers": [], "switches": []}
