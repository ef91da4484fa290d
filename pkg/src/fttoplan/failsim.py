"""Logical Ethernet graph, simplified spanning tree and failure scenarios.

Fiber edges depend on a cable interval ([0, p) for toward-A taps,
(p, length] for toward-B): a cable cut removes every edge whose interval
contains the cut position.  Copper cross-links between neighboring
switches carry no cable dependency, which is exactly why they make the
architecture survive a severed optical path.

The spanning tree is a single-instance, timer-free selection: topology
outcome only, no protocol dynamics.  Reachability ignores blocking (a
blocked port is still a usable backup path after reconvergence).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Union

from .errors import InvariantError, UnknownElementError
from .model import FiberPlant, LiveInterval


@dataclass(frozen=True)
class GraphEdge:
    id: str
    kind: str  # "fiber" | "copper"
    a: str
    b: str
    cost: float = 1.0
    enabled: bool = True  # admin state
    cable: Optional[str] = None
    interval: Optional[LiveInterval] = None
    box: Optional[str] = None  # tap box, for box failures
    switch: Optional[str] = None  # served switch, for transceiver failures

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass(frozen=True)
class LogicalGraph:
    nodes: tuple[str, ...]
    core_nodes: tuple[str, ...]
    edges: tuple[GraphEdge, ...]
    core_priority: Mapping[str, int] = field(default_factory=dict)
    switch_ports: Mapping[str, int] = field(default_factory=dict)
    switch_office: Mapping[str, str] = field(default_factory=dict)
    cable_lengths: Mapping[str, float] = field(default_factory=dict)
    box_ids: tuple[str, ...] = ()
    pre_failure: Optional["LogicalGraph"] = None

    def enabled_edges(self) -> list[GraphEdge]:
        return [e for e in self.edges if e.enabled]

    def baseline(self) -> "LogicalGraph":
        return self.pre_failure if self.pre_failure is not None else self


def build_graph(plant: FiberPlant, *, edge_costs: Optional[Mapping[str, float]] = None) -> LogicalGraph:
    """One fiber edge per attached uplink, one copper edge per cross-link pair."""
    costs = edge_costs or {}
    edges: list[GraphEdge] = []
    for sw in plant.switches:
        if sw.uplink is None:
            continue
        up = sw.uplink
        box = plant.box_by_id[up.box]
        edge_id = f"fiber:{sw.id}"
        edges.append(
            GraphEdge(
                id=edge_id,
                kind="fiber",
                a=up.core,
                b=sw.id,
                cost=costs.get(edge_id, 1.0),
                cable=box.cable,
                interval=plant.live_interval(up),
                box=box.id,
                switch=sw.id,
            )
        )

    seen_pairs: set[tuple[str, str]] = set()
    for sw in plant.switches:
        if sw.cross_link_peer is None:
            continue
        peer = plant.switch_by_id.get(sw.cross_link_peer)
        if peer is None or peer.cross_link_peer != sw.id:
            raise InvariantError(f"switches[{sw.id}]: cross-link to {sw.cross_link_peer!r} is not symmetric")
        if not sw.internal_rj45 or not peer.internal_rj45:
            raise InvariantError(f"switches[{sw.id}]: cross-link needs internal RJ45 on both ends")
        pair = tuple(sorted((sw.id, peer.id)))
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        edge_id = f"copper:{pair[0]}~{pair[1]}"
        edges.append(GraphEdge(id=edge_id, kind="copper", a=pair[0], b=pair[1], cost=costs.get(edge_id, 1.0)))

    return LogicalGraph(
        nodes=tuple(c.id for c in plant.cores) + tuple(s.id for s in plant.switches),
        core_nodes=tuple(c.id for c in plant.cores),
        edges=tuple(edges),
        core_priority={c.id: c.bridge_priority for c in plant.cores},
        switch_ports={s.id: s.user_port_count for s in plant.switches},
        switch_office={s.id: s.office for s in plant.switches},
        cable_lengths={c.id: c.length_m for c in plant.loops},
        box_ids=tuple(b.id for b in plant.boxes),
    )


# -- spanning tree -------------------------------------------------------------


@dataclass(frozen=True)
class SpanningTree:
    roots: tuple[str, ...]
    active: tuple[str, ...]  # tree edge ids, sorted
    blocking: tuple[str, ...]  # enabled non-tree edge ids, sorted


def _adjacency(graph: LogicalGraph) -> dict[str, list[GraphEdge]]:
    adj: dict[str, list[GraphEdge]] = {n: [] for n in graph.nodes}
    for e in graph.enabled_edges():
        adj[e.a].append(e)
        adj[e.b].append(e)
    return adj


def _components(graph: LogicalGraph) -> list[list[str]]:
    adj = _adjacency(graph)
    seen: set[str] = set()
    out = []
    for start in sorted(graph.nodes):
        if start in seen:
            continue
        component = []
        queue = [start]
        seen.add(start)
        while queue:
            node = queue.pop()
            component.append(node)
            for e in adj[node]:
                peer = e.other(node)
                if peer not in seen:
                    seen.add(peer)
                    queue.append(peer)
        out.append(sorted(component))
    return out


def spanning_tree(graph: LogicalGraph) -> SpanningTree:
    """Loop-free active topology, one tree per connected component.

    The root is the core with the lowest (bridge priority, id); a core-less
    component falls back to its lowest node id.  Each non-root node keeps
    the edge minimizing (path cost, neighbor id, edge id); every other
    enabled edge blocks.
    """
    adj = _adjacency(graph)
    roots: list[str] = []
    active: set[str] = set()

    for component in _components(graph):
        cores = [n for n in component if n in graph.core_priority]
        if cores:
            root = min(cores, key=lambda n: (graph.core_priority[n], n))
        else:
            root = component[0]
        roots.append(root)

        dist: dict[str, float] = {root: 0.0}
        heap: list[tuple[float, str]] = [(0.0, root)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist.get(node, float("inf")):
                continue
            for e in adj[node]:
                peer = e.other(node)
                nd = d + e.cost
                if nd < dist.get(peer, float("inf")):
                    dist[peer] = nd
                    heapq.heappush(heap, (nd, peer))

        for node in component:
            if node == root:
                continue
            best = min(
                ((dist[e.other(node)] + e.cost, e.other(node), e.id) for e in adj[node]),
            )
            active.add(best[2])

    blocking = sorted(e.id for e in graph.enabled_edges() if e.id not in active)
    return SpanningTree(roots=tuple(sorted(roots)), active=tuple(sorted(active)), blocking=tuple(blocking))


# -- failure scenarios -----------------------------------------------------------


@dataclass(frozen=True)
class CableCut:
    cable: str
    chainage_m: float


@dataclass(frozen=True)
class TransceiverFail:
    switch: str  # the uplink serving this switch
    end: str = "switch"  # "switch" | "core"; either end severs the link


@dataclass(frozen=True)
class CoreFail:
    core: str


@dataclass(frozen=True)
class BoxFail:
    box: str


@dataclass(frozen=True)
class SwitchFail:
    switch: str


FailureEvent = Union[CableCut, TransceiverFail, CoreFail, BoxFail, SwitchFail]


@dataclass(frozen=True)
class FailureScenario:
    events: tuple[FailureEvent, ...] = ()


def describe_event(event: FailureEvent) -> tuple[str, str, str]:
    """(kind, target, detail) triple used in reports."""
    if isinstance(event, CableCut):
        return ("cable_cut", event.cable, f"{event.chainage_m:g} m")
    if isinstance(event, TransceiverFail):
        return ("transceiver_fail", event.switch, event.end)
    if isinstance(event, CoreFail):
        return ("core_fail", event.core, "")
    if isinstance(event, BoxFail):
        return ("box_fail", event.box, "")
    return ("switch_fail", event.switch, "")


def apply_scenario(graph: LogicalGraph, scenario: FailureScenario) -> LogicalGraph:
    """Surviving graph after all events; the input graph is untouched."""
    dead_nodes: set[str] = set()
    dead_edges: set[str] = set()

    for event in scenario.events:
        if isinstance(event, CableCut):
            if event.cable not in graph.cable_lengths:
                raise UnknownElementError(f"unknown cable {event.cable!r}")
            length = graph.cable_lengths[event.cable]
            if not 0 <= event.chainage_m <= length:
                raise UnknownElementError(
                    f"cut at {event.chainage_m:g} m outside [0, {length:g}] on {event.cable}"
                )
            for e in graph.edges:
                if e.cable == event.cable and e.interval is not None and e.interval.contains(event.chainage_m):
                    dead_edges.add(e.id)
        elif isinstance(event, TransceiverFail):
            if event.end not in ("switch", "core"):
                raise UnknownElementError(f"transceiver end {event.end!r} must be switch or core")
            if event.switch not in graph.baseline().switch_ports:
                raise UnknownElementError(f"unknown switch {event.switch!r}")
            dead_edges.update(
                e.id for e in graph.edges if e.kind == "fiber" and e.switch == event.switch
            )
        elif isinstance(event, CoreFail):
            if event.core not in graph.baseline().core_nodes:
                raise UnknownElementError(f"unknown core {event.core!r}")
            dead_nodes.add(event.core)
        elif isinstance(event, BoxFail):
            if event.box not in graph.box_ids:
                raise UnknownElementError(f"unknown box {event.box!r}")
            dead_edges.update(e.id for e in graph.edges if e.box == event.box)
        elif isinstance(event, SwitchFail):
            if event.switch not in graph.baseline().switch_ports:
                raise UnknownElementError(f"unknown switch {event.switch!r}")
            dead_nodes.add(event.switch)
        else:
            raise UnknownElementError(f"unknown event type {type(event).__name__}")

    nodes = tuple(n for n in graph.nodes if n not in dead_nodes)
    edges = tuple(
        e
        for e in graph.edges
        if e.id not in dead_edges and e.a not in dead_nodes and e.b not in dead_nodes
    )
    return replace(
        graph,
        nodes=nodes,
        core_nodes=tuple(c for c in graph.core_nodes if c not in dead_nodes),
        edges=edges,
        pre_failure=graph.baseline(),
    )


# -- reachability ------------------------------------------------------------------


@dataclass(frozen=True)
class ReachabilityReport:
    switch_reachable: Mapping[str, bool]
    office_served: Mapping[str, bool]
    lost_user_ports: int
    blocking_edges: tuple[str, ...]  # of the pre-failure spanning tree


def reachability(graph: LogicalGraph) -> ReachabilityReport:
    """A switch is served iff some surviving path reaches a surviving core."""
    adj = _adjacency(graph)
    reached: set[str] = set()
    queue = [c for c in graph.core_nodes if c in adj]
    reached.update(queue)
    while queue:
        node = queue.pop()
        for e in adj[node]:
            peer = e.other(node)
            if peer not in reached:
                reached.add(peer)
                queue.append(peer)

    baseline = graph.baseline()
    switch_reachable = {s: s in reached for s in sorted(baseline.switch_ports)}
    offices: dict[str, bool] = {}
    for switch_id, office in sorted(baseline.switch_office.items()):
        offices[office] = offices.get(office, False) or switch_reachable[switch_id]
    lost = sum(
        ports for s, ports in baseline.switch_ports.items() if not switch_reachable[s]
    )
    return ReachabilityReport(
        switch_reachable=switch_reachable,
        office_served=dict(sorted(offices.items())),
        lost_user_ports=lost,
        blocking_edges=spanning_tree(baseline).blocking,
    )


# -- single-failure sweep -------------------------------------------------------------


@dataclass(frozen=True)
class CriticalityEntry:
    kind: str
    target: str
    detail: str
    lost_user_ports: int
    unreachable_switches: tuple[str, ...]


@dataclass(frozen=True)
class CriticalityReport:
    entries: tuple[CriticalityEntry, ...]
    worst_lost_ports: int

    def worst_entries(self) -> tuple[CriticalityEntry, ...]:
        return tuple(e for e in self.entries if e.lost_user_ports == self.worst_lost_ports)


def cut_positions(plant: FiberPlant, cable_id: str) -> list[float]:
    """One representative cut per maximal interval between consecutive taps.

    Two cuts between the same pair of consecutive tap chainages sever the
    same edges, so midpoints cover every distinct single-cut outcome.
    """
    cable = plant.loop_by_id[cable_id]
    points = sorted({box.chainage_m for box, _tap in plant.taps_on(cable_id)})
    bounds = [0.0] + points + [cable.length_m]
    return [(lo + hi) / 2.0 for lo, hi in zip(bounds, bounds[1:]) if lo < hi]


def enumerate_single_failures(plant: FiberPlant, *, graph: Optional[LogicalGraph] = None) -> CriticalityReport:
    """Evaluate every single cable cut (one per interval) and device failure."""
    base = graph if graph is not None else build_graph(plant)
    events: list[FailureEvent] = []
    for cable in plant.loops:
        for position in cut_positions(plant, cable.id):
            events.append(CableCut(cable.id, position))
    for core in plant.cores:
        events.append(CoreFail(core.id))
    for box in sorted(plant.boxes, key=lambda b: b.id):
        if any(e.box == box.id for e in base.edges):
            events.append(BoxFail(box.id))
    for sw in sorted(plant.switches, key=lambda s: s.id):
        events.append(SwitchFail(sw.id))

    entries = []
    worst = 0
    for event in events:
        survivor = apply_scenario(base, FailureScenario((event,)))
        report = reachability(survivor)
        kind, target, detail = describe_event(event)
        lost = report.lost_user_ports
        worst = max(worst, lost)
        entries.append(
            CriticalityEntry(
                kind=kind,
                target=target,
                detail=detail,
                lost_user_ports=lost,
                unreachable_switches=tuple(
                    s for s, ok in report.switch_reachable.items() if not ok
                ),
            )
        )
    return CriticalityReport(entries=tuple(entries), worst_lost_ports=worst)


# -- export -----------------------------------------------------------------------------


def to_dot(graph: LogicalGraph) -> str:
    """Graphviz DOT rendering of the logical topology (deterministic)."""
    lines = ["graph plant {"]
    for node in sorted(graph.nodes):
        shape = "box" if node in graph.core_priority else "ellipse"
        lines.append(f'  "{node}" [shape={shape}];')
    for e in sorted(graph.edges, key=lambda e: e.id):
        attrs = []
        if e.kind == "copper":
            attrs.append("style=dashed")
        else:
            attrs.append(f'label="{e.cable} {e.interval}"')
        if not e.enabled:
            attrs.append("color=gray")
        lines.append(f'  "{e.a}" -- "{e.b}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
