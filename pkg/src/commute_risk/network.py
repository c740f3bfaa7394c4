"""Synthetic multimodal network: street graph, transit routes, trip queries.

Coordinates are planar metres. Street edges are undirected and carry the
set of modes allowed to traverse them; transit routes reference street
nodes as stops and carry period-dependent headways and per-link run
times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Node",
    "Edge",
    "Period",
    "TransitRoute",
    "MultimodalNetwork",
    "TripQuery",
    "NetworkError",
    "QUERY_MODES",
]

QUERY_MODES = ("transit", "walk", "bike", "drive", "ride_hailing")

# street-mode to use when routing each query mode
STREET_MODE = {"walk": "walk", "bike": "bike", "drive": "drive", "ride_hailing": "drive"}


class NetworkError(ValueError):
    """Structural problem in network data (dangling reference, bad geometry)."""


@dataclass(frozen=True)
class Node:
    id: str
    x: float
    y: float
    zone: str


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    modes: frozenset[str]
    length_m: float

    def other(self, node: str) -> str:
        return self.v if node == self.u else self.u


@dataclass(frozen=True)
class Period:
    """Half-open time-of-day window [start_h, end_h)."""

    name: str
    start_h: float
    end_h: float


@dataclass(frozen=True)
class TransitRoute:
    id: str
    kind: str  # "bus" | "rail"
    stops: tuple[str, ...]
    headway_h: dict[str, float]
    link_tt_h: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("bus", "rail"):
            raise NetworkError(f"route {self.id}: unknown kind {self.kind!r}")
        if len(self.stops) < 2:
            raise NetworkError(f"route {self.id}: needs at least two stops")
        if len(self.link_tt_h) != len(self.stops) - 1:
            raise NetworkError(
                f"route {self.id}: {len(self.stops)} stops need "
                f"{len(self.stops) - 1} link times, got {len(self.link_tt_h)}"
            )
        if any(t <= 0 for t in self.link_tt_h):
            raise NetworkError(f"route {self.id}: link times must be > 0")


@dataclass
class MultimodalNetwork:
    nodes: dict[str, Node]
    edges: dict[str, Edge]
    routes: dict[str, TransitRoute]
    periods: tuple[Period, ...]
    mode_speeds_m_h: dict[str, float]

    def __post_init__(self) -> None:
        self.validate()
        self._adjacency: dict[str, dict[str, list[Edge]]] = {}
        self.graph_cache: dict = {}

    def validate(self) -> None:
        for edge in self.edges.values():
            for endpoint in (edge.u, edge.v):
                if endpoint not in self.nodes:
                    raise NetworkError(f"edge {edge.id}: unknown node {endpoint!r}")
            if edge.length_m <= 0:
                raise NetworkError(f"edge {edge.id}: length must be > 0")
        period_names = {p.name for p in self.periods}
        for route in self.routes.values():
            for stop in route.stops:
                if stop not in self.nodes:
                    raise NetworkError(f"route {route.id}: stop {stop!r} is not a node")
            unknown = set(route.headway_h) - period_names
            if unknown:
                raise NetworkError(f"route {route.id}: unknown periods {sorted(unknown)}")

    def period_at(self, hour: float) -> Period:
        h = hour % 24.0
        for period in self.periods:
            if period.start_h <= h < period.end_h:
                return period
        raise NetworkError(f"no period covers hour {h}")

    def nearest_node(self, x: float, y: float) -> str:
        if not self.nodes:
            raise NetworkError("network has no nodes")
        return min(
            self.nodes.values(), key=lambda n: ((n.x - x) ** 2 + (n.y - y) ** 2, n.id)
        ).id

    def adjacency(self, street_mode: str) -> dict[str, list[Edge]]:
        """Node -> incident edges for one street mode (cached, undirected)."""
        if street_mode not in self._adjacency:
            adj: dict[str, list[Edge]] = {}
            for edge in self.edges.values():
                if street_mode in edge.modes:
                    adj.setdefault(edge.u, []).append(edge)
                    adj.setdefault(edge.v, []).append(edge)
            for edges in adj.values():
                edges.sort(key=lambda e: e.id)
            self._adjacency[street_mode] = adj
        return self._adjacency[street_mode]

    def edge_time_h(self, edge: Edge, street_mode: str) -> float:
        speed = self.mode_speeds_m_h.get(street_mode)
        if not speed or speed <= 0:
            raise NetworkError(f"no speed configured for mode {street_mode!r}")
        return edge.length_m / speed

    def distance_m(self, a: str, b: str) -> float:
        na, nb = self.nodes[a], self.nodes[b]
        return math.hypot(na.x - nb.x, na.y - nb.y)

    def route_mode(self, route: TransitRoute) -> str:
        return "transit_rail" if route.kind == "rail" else "transit_bus"


@dataclass(frozen=True)
class TripQuery:
    """One door-to-door request: endpoints, departure time, primary mode."""

    origin: str | tuple[float, float]
    destination: str | tuple[float, float]
    depart_s: float
    mode: str

    def __post_init__(self) -> None:
        if self.origin == self.destination:
            raise ValueError("origin and destination must differ")
        if not 0 <= self.depart_s < 86400:
            raise ValueError(f"departure must be in [0, 86400) seconds, got {self.depart_s}")
        if self.mode not in QUERY_MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {QUERY_MODES}")

    @property
    def depart_h(self) -> float:
        return self.depart_s / 3600.0
