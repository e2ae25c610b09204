"""Weighted directed hierarchy graphs and their structural queries.

A hierarchy is a connected directed graph whose edge weights are normalized
over each vertex's predecessors: whoever has at least one incoming edge
receives total incoming weight 1.  Vertices play one of three roles:
"decider" (no predecessors, issues commands), "executive" (plays the base
game), or "agent" (everything in between).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .errors import GraphFormatError

ROLE_DECIDER = "decider"
ROLE_AGENT = "agent"
ROLE_EXECUTIVE = "executive"
ROLES = (ROLE_DECIDER, ROLE_AGENT, ROLE_EXECUTIVE)

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Vertex:
    id: str
    role: str


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: float


@dataclass(frozen=True)
class HierarchyGraph:
    """Immutable hierarchy: vertices, weighted directed edges, and the two
    vote parameters carried by graph files (free float and noise width)."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    free_float: float
    noise_sigma: float

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def roles(self) -> dict[str, str]:
        return {v.id: v.role for v in self.vertices}

    @cached_property
    def pred_map(self) -> dict[str, tuple[tuple[str, float], ...]]:
        """vertex id -> ((predecessor id, weight), ...) in edge order."""
        out: dict[str, list[tuple[str, float]]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if e.dst in out:
                out[e.dst].append((e.src, e.weight))
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def succ_map(self) -> dict[str, tuple[tuple[str, float], ...]]:
        out: dict[str, list[tuple[str, float]]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if e.src in out:
                out[e.src].append((e.dst, e.weight))
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def undirected_adjacency(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v.id: set() for v in self.vertices}
        for e in self.edges:
            if e.src in adj and e.dst in adj and e.src != e.dst:
                adj[e.src].add(e.dst)
                adj[e.dst].add(e.src)
        return {k: frozenset(v) for k, v in adj.items()}

    def require_vertex(self, vertex: str) -> None:
        if vertex not in self.roles:
            raise ValueError(f"unknown vertex id {vertex!r}")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_graph(g: HierarchyGraph) -> ValidationReport:
    """Check every structural invariant and return the full report.

    Violations make the graph unusable; warnings point at unusual but
    permitted structure (an executive that still has successors, say).
    """
    violations: list[str] = []
    warnings: list[str] = []

    seen: set[str] = set()
    for v in g.vertices:
        if v.id in seen:
            violations.append(f"duplicate vertex id {v.id!r}")
        seen.add(v.id)
        if v.role not in ROLES:
            violations.append(f"vertex {v.id} has unknown role {v.role!r}")

    ids = set(g.vertex_ids)
    seen_edges: set[tuple[str, str]] = set()
    for e in g.edges:
        if e.src not in ids or e.dst not in ids:
            violations.append(f"edge {e.src}->{e.dst} references an unknown vertex")
            continue
        if e.src == e.dst:
            violations.append(f"self-loop on vertex {e.src}")
        if (e.src, e.dst) in seen_edges:
            violations.append(f"duplicate edge {e.src}->{e.dst}")
        seen_edges.add((e.src, e.dst))
        if not e.weight > 0.0:
            violations.append(f"edge {e.src}->{e.dst} has non-positive weight {e.weight}")

    if not 0.0 < g.free_float < 1.0:
        violations.append(f"free_float {g.free_float} outside (0, 1)")
    if not g.noise_sigma > 0.0:
        violations.append(f"noise_sigma {g.noise_sigma} must be positive")

    for vid, preds in g.pred_map.items():
        if not preds:
            continue
        total = sum(w for _, w in preds)
        if abs(total - 1.0) > WEIGHT_TOL:
            violations.append(f"predecessor weights of vertex {vid} sum to {total:.10g}")

    for v in g.vertices:
        has_preds = bool(g.pred_map.get(v.id))
        if v.role == ROLE_DECIDER and has_preds:
            violations.append(f"decider {v.id} has predecessors")
        if v.role != ROLE_DECIDER and not has_preds:
            violations.append(
                f"vertex {v.id} has no predecessors but role {v.role!r} (deciders and "
                "command-takers must be disjoint)"
            )
        if v.role == ROLE_EXECUTIVE and g.succ_map.get(v.id):
            warnings.append(f"executive {v.id} has successors")

    if g.vertices and not violations:
        start = g.vertex_ids[0]
        reached = _reach({start}, g.undirected_adjacency, removed=frozenset())
        if len(reached) != len(g.vertices):
            missing = sorted(ids - reached)
            violations.append(f"graph is not connected (unreached: {', '.join(missing)})")

    if not g.vertices:
        violations.append("graph has no vertices")

    return ValidationReport(tuple(violations), tuple(warnings))


def deciders(g: HierarchyGraph) -> frozenset[str]:
    """Vertices with no predecessors (the command issuers)."""
    return frozenset(v for v, preds in g.pred_map.items() if not preds)


def executives(g: HierarchyGraph) -> frozenset[str]:
    return frozenset(v.id for v in g.vertices if v.role == ROLE_EXECUTIVE)


def predecessors(g: HierarchyGraph, vertex: str) -> dict[str, float]:
    """Incoming neighbours of `vertex` with their normalized weights."""
    g.require_vertex(vertex)
    return dict(g.pred_map[vertex])


def successors(g: HierarchyGraph, vertex: str) -> dict[str, float]:
    g.require_vertex(vertex)
    return dict(g.succ_map[vertex])


def has_directed_cycle(g: HierarchyGraph) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in g.vertex_ids}
    succ = g.succ_map
    for root in g.vertex_ids:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, Iterable[str]]] = [(root, iter([w for w, _ in succ[root]]))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GRAY:
                    return True
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter([w for w, _ in succ[nxt]])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return False


def _reach(sources: set[str], adj: Mapping[str, frozenset[str]],
           removed: frozenset[str]) -> set[str]:
    """Vertices reachable from `sources` along undirected edges, never
    entering `removed`."""
    seen = set(s for s in sources if s not in removed)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen and w not in removed:
                seen.add(w)
                queue.append(w)
    return seen


def nodes_between_adjacency(adj: Mapping[str, frozenset[str]],
                            a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
    """Interior of the A-to-B corridor on an undirected adjacency map.

    A vertex outside A and B is "beyond A" when removing A disconnects it
    from B, and symmetrically for "beyond B".  The corridor interior is
    everything else: vertices that can still see B around A and A around B.
    A and B themselves are excluded; callers treat them as fixed boundary.
    """
    if not a or not b:
        raise ValueError("both vertex sets must be nonempty")
    if a & b:
        raise ValueError("vertex sets must be disjoint")
    for v in a | b:
        if v not in adj:
            raise ValueError(f"unknown vertex id {v!r}")
    sees_b = _reach(set(b), adj, removed=frozenset(a))
    sees_a = _reach(set(a), adj, removed=frozenset(b))
    return frozenset((sees_a & sees_b) - a - b)


def nodes_between(g: HierarchyGraph, a: Iterable[str], b: Iterable[str]) -> frozenset[str]:
    """Interior vertices of the undirected corridor between sets A and B."""
    return nodes_between_adjacency(g.undirected_adjacency, frozenset(a), frozenset(b))


def is_locally_tree(g: HierarchyGraph,
                    command_set: Iterable[str] | None = None,
                    executive_set: Iterable[str] | None = None) -> bool:
    """True when, for every executive i, the subgraph induced on
    corridor(commands, {i}) plus both endpoints is an undirected tree
    (acyclic; one simple edge per vertex pair)."""
    lam = frozenset(command_set) if command_set is not None else deciders(g)
    execs = frozenset(executive_set) if executive_set is not None else executives(g)
    if not lam or not execs:
        raise ValueError("need nonempty command and executive sets")
    adj = g.undirected_adjacency
    for i in execs:
        zone = nodes_between(g, lam, {i}) | lam | {i}
        edge_count = sum(1 for v in zone for w in adj[v] if w in zone) // 2
        comp_count = 0
        unseen = set(zone)
        while unseen:
            v = unseen.pop()
            comp = _reach({v}, adj, removed=frozenset(set(adj) - zone))
            unseen -= comp
            comp_count += 1
        if edge_count != len(zone) - comp_count:
            return False
    return True


def graph_to_dict(g: HierarchyGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "role": v.role} for v in g.vertices],
        "edges": [{"from": e.src, "to": e.dst, "weight": e.weight} for e in g.edges],
        "free_float": g.free_float,
        "noise_sigma": g.noise_sigma,
    }


def graph_from_dict(data: Mapping, validate: bool = True) -> HierarchyGraph:
    """Build and fully validate a hierarchy from parsed JSON data.

    Raises GraphFormatError on malformed structure or, unless `validate` is
    off, on any invariant violation; the message lists every problem found.
    Pass validate=False to get the raw object for a diagnostic report.
    """
    try:
        raw_vertices = data["vertices"]
        raw_edges = data["edges"]
        free_float = float(data["free_float"])
        noise_sigma = float(data["noise_sigma"])
        vertices = tuple(Vertex(str(v["id"]), str(v["role"])) for v in raw_vertices)
        edges = tuple(
            Edge(str(e["from"]), str(e["to"]), float(e["weight"])) for e in raw_edges
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph data: {exc}") from exc
    g = HierarchyGraph(vertices, edges, free_float, noise_sigma)
    if validate:
        report = validate_graph(g)
        if not report.ok:
            raise GraphFormatError("; ".join(report.violations))
    return g


def load_graph(path: str | Path, validate: bool = True) -> HierarchyGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise GraphFormatError(f"cannot read graph file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"graph file {path} is not valid JSON: {exc}") from exc
    return graph_from_dict(data, validate=validate)


def save_graph(g: HierarchyGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
