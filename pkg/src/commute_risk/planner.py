"""Feasible path generation and route choice over the synthetic network.

Stands in for an external routing API: a Yen-style k-shortest-path search
over the multimodal graph produces candidate itineraries, which are then
decomposed into single-mode segments (transfers always split transit
legs; short walk legs are dropped from the risk decomposition). Choice
probabilities come from a multinomial logit over path attributes with a
commonality-factor correction for overlapping alternatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import islice
from typing import Sequence

import networkx as nx
import numpy as np

from .network import STREET_MODE, MultimodalNetwork, TransitRoute, TripQuery
from .segments import Segment, TravelMode

__all__ = [
    "PlannerConfig",
    "PathAttributes",
    "Path",
    "ChoiceModel",
    "NoPathError",
    "plan",
    "commonality_factor",
    "with_commonality",
    "choose",
]

MIN_WALK_SEGMENT_H = 3.0 / 60.0
MIN_WALK_SEGMENT_M = 1000.0


class NoPathError(Exception):
    """The destination is unreachable for the requested mode."""


@dataclass(frozen=True)
class PlannerConfig:
    """Generalized-cost weights, fares and feasibility limits.

    Weights convert hours (or currency units) into comparable cost; the
    defaults value walking and waiting at twice in-vehicle time and money
    at 20 currency units per hour.
    """

    weight_walk: float = 2.0
    weight_wait: float = 2.0
    weight_in_vehicle: float = 1.0
    weight_cost: float = 0.05  # hours of equivalent cost per currency unit
    transit_fare: float = 2.4
    drive_cost_per_km: float = 0.6
    ridehail_base_fare: float = 2.0
    ridehail_cost_per_km: float = 1.2
    max_walk_trip_km: float = 10.0
    max_candidates: int = 60


@dataclass(frozen=True)
class PathAttributes:
    walk_time_h: float
    wait_time_h: float
    in_vehicle_time_h: float
    monetary_cost: float
    commonality: float = 0.0

    def vector(self) -> tuple[float, float, float, float, float]:
        return (
            self.walk_time_h,
            self.wait_time_h,
            self.in_vehicle_time_h,
            self.monetary_cost,
            self.commonality,
        )


@dataclass(frozen=True)
class Path:
    segments: tuple[Segment, ...]
    attributes: PathAttributes
    links: tuple[tuple[str, float], ...]  # (link key, length m) for overlap math
    generalized_cost: float

    @property
    def total_time_h(self) -> float:
        a = self.attributes
        return a.walk_time_h + a.wait_time_h + a.in_vehicle_time_h

    @property
    def length_m(self) -> float:
        return sum(length for _, length in self.links)


@dataclass(frozen=True)
class ChoiceModel:
    """Linear-in-parameters utility over (attributes, commonality factor)."""

    beta_walk: float = -2.0
    beta_wait: float = -2.0
    beta_in_vehicle: float = -1.0
    beta_cost: float = -0.05
    beta_commonality: float = -1.0

    def utility(self, attrs: PathAttributes) -> float:
        return (
            self.beta_walk * attrs.walk_time_h
            + self.beta_wait * attrs.wait_time_h
            + self.beta_in_vehicle * attrs.in_vehicle_time_h
            + self.beta_cost * attrs.monetary_cost
            + self.beta_commonality * attrs.commonality
        )


def _resolve(network: MultimodalNetwork, endpoint: str | tuple[float, float]) -> str:
    if isinstance(endpoint, str):
        if endpoint not in network.nodes:
            raise NoPathError(f"unknown node {endpoint!r}")
        return endpoint
    x, y = endpoint
    return network.nearest_node(x, y)


def _street_graph(network: MultimodalNetwork, street_mode: str) -> nx.Graph:
    cache = network.graph_cache
    key = ("street", street_mode)
    if key in cache:
        return cache[key]
    g = nx.Graph()
    for edge in network.edges.values():
        if street_mode not in edge.modes:
            continue
        t = network.edge_time_h(edge, street_mode)
        prior = g.get_edge_data(edge.u, edge.v)
        # parallel edges collapse to the fastest, ties to the smallest id
        if prior is None or (t, edge.id) < (prior["time_h"], prior["edge_id"]):
            g.add_edge(edge.u, edge.v, time_h=t, edge_id=edge.id, length_m=edge.length_m)
    cache[key] = g
    return g


def _mode_pure_paths(
    query: TripQuery, network: MultimodalNetwork, k: int, config: PlannerConfig
) -> list[Path]:
    street_mode = STREET_MODE[query.mode]
    g = _street_graph(network, street_mode)
    origin = _resolve(network, query.origin)
    dest = _resolve(network, query.destination)
    if origin == dest:
        raise NoPathError("origin and destination snap to the same node")
    if origin not in g or dest not in g:
        raise NoPathError(f"no {street_mode} streets at requested endpoints")
    try:
        node_paths = list(islice(nx.shortest_simple_paths(g, origin, dest, weight="time_h"), k))
    except nx.NetworkXNoPath:
        raise NoPathError(f"{dest!r} unreachable from {origin!r} by {query.mode}") from None
    paths = []
    for nodes in node_paths:
        edge_ids, links, time_h, length_m = [], [], 0.0, 0.0
        for u, v in zip(nodes, nodes[1:]):
            data = g[u][v]
            edge_ids.append(data["edge_id"])
            links.append((data["edge_id"], data["length_m"]))
            time_h += data["time_h"]
            length_m += data["length_m"]
        paths.append(
            _finish_mode_pure(query, config, tuple(edge_ids), tuple(links), time_h, length_m)
        )
    if query.mode == "walk":
        paths = [p for p in paths if p.length_m <= config.max_walk_trip_km * 1000.0]
        if not paths:
            raise NoPathError(
                f"walk itinerary exceeds the {config.max_walk_trip_km:g} km walking limit"
            )
    return paths


def _finish_mode_pure(
    query: TripQuery,
    config: PlannerConfig,
    edge_ids: tuple[str, ...],
    links: tuple[tuple[str, float], ...],
    time_h: float,
    length_m: float,
) -> Path:
    mode = TravelMode(query.mode)
    km = length_m / 1000.0
    if query.mode == "drive":
        cost, walk_h, ivt_h = config.drive_cost_per_km * km, 0.0, time_h
    elif query.mode == "ride_hailing":
        cost = config.ridehail_base_fare + config.ridehail_cost_per_km * km
        walk_h, ivt_h = 0.0, time_h
    else:  # walk / bike
        cost, walk_h, ivt_h = 0.0, (time_h if query.mode == "walk" else 0.0), (
            0.0 if query.mode == "walk" else time_h
        )
    segment = Segment(mode=mode, duration=time_h, geometry=edge_ids)
    segments: tuple[Segment, ...] = (segment,)
    if mode is TravelMode.WALK and (time_h < MIN_WALK_SEGMENT_H or length_m < MIN_WALK_SEGMENT_M):
        segments = ()
    attrs = PathAttributes(walk_h, 0.0, ivt_h, cost)
    generalized = (
        config.weight_walk * walk_h
        + config.weight_in_vehicle * ivt_h
        + config.weight_cost * cost
    )
    return Path(segments=segments, attributes=attrs, links=links, generalized_cost=generalized)


def _transit_graph(
    network: MultimodalNetwork, depart_h: float, config: PlannerConfig
) -> nx.DiGraph:
    """Layered digraph: street layer plus one on-board layer per route."""
    cache = network.graph_cache
    key = ("transit", network.period_at(depart_h).name, config)
    if key in cache:
        return cache[key]
    g = nx.DiGraph()
    walk = _street_graph(network, "walk")
    for u, v, data in walk.edges(data=True):
        w = config.weight_walk * data["time_h"]
        g.add_edge(("st", u), ("st", v), weight=w, kind="walk", **data)
        g.add_edge(("st", v), ("st", u), weight=w, kind="walk", **data)
    for route in network.routes.values():
        period = network.period_at(depart_h)
        headway = route.headway_h.get(period.name)
        if headway is None or headway <= 0:
            continue  # route not running in this period
        wait_h = headway / 2.0
        for stop in route.stops:
            g.add_edge(
                ("st", stop),
                ("ride", route.id, stop),
                weight=config.weight_wait * wait_h + config.weight_cost * config.transit_fare,
                kind="board",
                wait_h=wait_h,
                fare=config.transit_fare,
                route_id=route.id,
            )
            g.add_edge(("ride", route.id, stop), ("st", stop), weight=0.0, kind="alight")
        # vehicles run in both directions along the stop sequence
        for i, tt in enumerate(route.link_tt_h):
            u, v = route.stops[i], route.stops[i + 1]
            for a, b in ((u, v), (v, u)):
                g.add_edge(
                    ("ride", route.id, a),
                    ("ride", route.id, b),
                    weight=config.weight_in_vehicle * tt,
                    kind="ride",
                    tt_h=tt,
                    route_id=route.id,
                    link_index=i,
                    length_m=network.distance_m(u, v),
                )
    cache[key] = g
    return g


def _decompose_transit(
    nodes: list, g: nx.DiGraph, network: MultimodalNetwork, config: PlannerConfig
) -> Path | None:
    """Turn one layered-graph itinerary into segments and attributes."""
    hops = [(g[u][v], u, v) for u, v in zip(nodes, nodes[1:])]
    if not any(h[0]["kind"] == "ride" for h in hops):
        return None
    segments: list[Segment] = []
    links: list[tuple[str, float]] = []
    walk_h = wait_h = ivt_h = cost = 0.0
    generalized = 0.0
    walk_run: list[tuple[str, float, float]] = []  # (edge id, time, length)
    ride_run: list[tuple[str, str, float, float]] = []  # (stop u, stop v, tt, length)
    ride_route: TransitRoute | None = None

    def flush_walk() -> None:
        nonlocal walk_run
        if not walk_run:
            return
        time_h = sum(t for _, t, _ in walk_run)
        length = sum(m for _, _, m in walk_run)
        if time_h >= MIN_WALK_SEGMENT_H and length >= MIN_WALK_SEGMENT_M:
            segments.append(
                Segment(
                    mode=TravelMode.WALK,
                    duration=time_h,
                    geometry=tuple(e for e, _, _ in walk_run),
                )
            )
        walk_run = []

    def flush_ride() -> None:
        nonlocal ride_run, ride_route
        if not ride_run or ride_route is None:
            return
        stops = tuple([ride_run[0][0]] + [v for _, v, _, _ in ride_run])
        segments.append(
            Segment(
                mode=TravelMode(network.route_mode(ride_route)),
                duration=sum(t for _, _, t, _ in ride_run),
                geometry=stops,
                route=ride_route.id,
            )
        )
        ride_run = []
        ride_route = None

    for data, u, v in hops:
        generalized += data["weight"]
        kind = data["kind"]
        if kind == "walk":
            flush_ride()
            walk_run.append((data["edge_id"], data["time_h"], data["length_m"]))
            walk_h += data["time_h"]
            links.append((data["edge_id"], data["length_m"]))
        elif kind == "board":
            flush_walk()
            flush_ride()
            wait_h += data["wait_h"]
            cost += data["fare"]
            ride_route = network.routes[data["route_id"]]
        elif kind == "ride":
            ride_run.append((u[2], v[2], data["tt_h"], data["length_m"]))
            ivt_h += data["tt_h"]
            links.append((f"t:{u[2]}:{v[2]}", data["length_m"]))
        elif kind == "alight":
            flush_ride()
    flush_walk()
    flush_ride()
    attrs = PathAttributes(walk_h, wait_h, ivt_h, cost)
    return Path(
        segments=tuple(segments),
        attributes=attrs,
        links=tuple(links),
        generalized_cost=generalized,
    )


def _transit_paths(
    query: TripQuery, network: MultimodalNetwork, k: int, config: PlannerConfig
) -> list[Path]:
    g = _transit_graph(network, query.depart_h, config)
    origin = ("st", _resolve(network, query.origin))
    dest = ("st", _resolve(network, query.destination))
    if origin == dest:
        raise NoPathError("origin and destination snap to the same node")
    if origin not in g or dest not in g:
        raise NoPathError("no walk access to the transit network at requested endpoints")
    paths: list[Path] = []
    try:
        candidates = nx.shortest_simple_paths(g, origin, dest, weight="weight")
        for nodes in islice(candidates, config.max_candidates):
            path = _decompose_transit(nodes, g, network, config)
            if path is not None:
                paths.append(path)
            if len(paths) >= k:
                break
    except nx.NetworkXNoPath:
        raise NoPathError("destination unreachable through the transit network") from None
    if not paths:
        raise NoPathError("no itinerary with a transit leg within the search budget")
    return paths


def plan(
    query: TripQuery,
    network: MultimodalNetwork,
    k: int = 1,
    config: PlannerConfig = PlannerConfig(),
) -> list[Path]:
    """Up to k loop-free paths for the query, cheapest first.

    Transit queries may include access/egress walk segments; other modes
    return single-segment mode-pure paths. Walk segments below the
    3-minute / 1-km floor never appear in the risk decomposition. Ties in
    generalized cost break on the lexicographic link-id sequence.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if query.mode == "transit":
        paths = _transit_paths(query, network, k, config)
    else:
        paths = _mode_pure_paths(query, network, k, config)
    paths.sort(key=lambda p: (round(p.generalized_cost, 12), tuple(key for key, _ in p.links)))
    return paths[:k]


def commonality_factor(
    path: Path, path_set: Sequence[Path], gamma: float = 1.0
) -> float:
    """Overlap measure ``ln sum_r' (L_shared / sqrt(L L'))**gamma``.

    Zero for a path that shares nothing with the rest of the set (the
    self-term contributes 1); grows with duplicated geometry.
    """
    own = {key: length for key, length in path.links}
    own_len = sum(own.values())
    if own_len <= 0.0:
        return 0.0
    total = 0.0
    for other in path_set:
        other_len = other.length_m
        if other_len <= 0.0:
            continue
        shared = sum(length for key, length in other.links if key in own)
        total += (shared / math.sqrt(own_len * other_len)) ** gamma
    return math.log(total) if total > 0.0 else 0.0


def with_commonality(paths: Sequence[Path], gamma: float = 1.0) -> list[Path]:
    """Rebuild each path's attributes with its commonality factor filled in."""
    return [
        Path(
            segments=p.segments,
            attributes=replace(p.attributes, commonality=commonality_factor(p, paths, gamma)),
            links=p.links,
            generalized_cost=p.generalized_cost,
        )
        for p in paths
    ]


def choose(paths: Sequence[Path], model: ChoiceModel = ChoiceModel()) -> np.ndarray:
    """Choice probabilities over the path set (softmax of utilities)."""
    if not paths:
        raise ValueError("need at least one path")
    utilities = np.array([model.utility(p.attributes) for p in paths])
    if not np.all(np.isfinite(utilities)):
        raise ValueError(f"non-finite path utility in {utilities!r}")
    shifted = utilities - utilities.max()
    weights = np.exp(shifted)
    return weights / weights.sum()
