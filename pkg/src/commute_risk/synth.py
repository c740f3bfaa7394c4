"""Synthetic stand-ins for the external data feeds.

Everything the engine would normally ingest from counts, fare-card
extracts or fleet data is generated here with matching schemas: street
by minute pedestrian/cyclist densities, per-route per-stop load and
run-time distributions with empirical infectiousness pools, and the
ride-hailing occupancy profile. All generators are deterministic given
a seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .network import MultimodalNetwork
from .sampling import RandomInput, derive_stream

__all__ = [
    "Zone",
    "DensityCell",
    "DensityGrid",
    "TripGenerationProfile",
    "StopProfile",
    "TransitProfiles",
    "RidehailProfile",
    "synthesize_density",
    "synthesize_transit_profiles",
    "synthesize_ridehail_profile",
]

MINUTES_PER_DAY = 1440


@dataclass(frozen=True)
class Zone:
    """Residential zone: centroid, population and local infection rate."""

    id: str
    x: float
    y: float
    population: float
    infection_rate: float
    radius_m: float = 800.0

    def __post_init__(self) -> None:
        if self.population < 0:
            raise ValueError(f"zone {self.id}: population must be >= 0")
        if not 0.0 <= self.infection_rate <= 1.0:
            raise ValueError(f"zone {self.id}: infection rate must be in [0, 1]")
        if self.radius_m <= 0:
            raise ValueError(f"zone {self.id}: radius must be > 0")


@dataclass(frozen=True)
class DensityCell:
    walk_mean: float = 0.0
    walk_var: float = 0.0
    bike_mean: float = 0.0
    bike_var: float = 0.0


@dataclass
class DensityGrid:
    """Street-edge by time-interval counts of pedestrians and cyclists.

    Cells are keyed by (edge id, interval index); the interval width in
    minutes is configurable (1 = the finest supported granularity).
    """

    interval_min: int = 1
    cells: dict[tuple[str, int], DensityCell] = field(default_factory=dict)

    @property
    def intervals_per_day(self) -> int:
        return -(-MINUTES_PER_DAY // self.interval_min)

    def lookup(self, edge: str, minute: float, mode: str) -> tuple[float, float]:
        index = int(minute % MINUTES_PER_DAY) // self.interval_min
        cell = self.cells.get((edge, index))
        if cell is None:
            return 0.0, 0.0
        if mode == "walk":
            return cell.walk_mean, cell.walk_var
        if mode == "bike":
            return cell.bike_mean, cell.bike_var
        raise ValueError(f"density has no counts for mode {mode!r}")


@dataclass(frozen=True)
class TripGenerationProfile:
    """How many active trips a zone generates and what they look like.

    ``samples_per_zone`` hypothetical trajectories are drawn per zone,
    mode and replication, each weighted ``population * trips_per_capita
    * share / samples_per_zone`` so that aggregate trip totals are exact
    and scale linearly with population.
    """

    trips_per_capita: float = 0.15
    walk_share: float = 0.6
    bike_share: float = 0.4
    departure_weights: tuple[float, ...] = ()
    departure_min: RandomInput | None = None  # overrides the hourly weights
    distance_m: RandomInput = RandomInput.normal(1500.0, 700.0)
    direction_rad: RandomInput = RandomInput.uniform(0.0, 2.0 * math.pi)
    samples_per_zone: int = 30

    def __post_init__(self) -> None:
        if not 0.0 <= self.walk_share <= 1.0 or not 0.0 <= self.bike_share <= 1.0:
            raise ValueError("mode shares must be in [0, 1]")
        if self.trips_per_capita < 0:
            raise ValueError("trips per capita must be >= 0")
        weights = self.departure_weights or tuple([1.0] * 24)
        if len(weights) != 24 or any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValueError("departure weights must be 24 non-negative values")
        object.__setattr__(
            self, "departure_weights", tuple(w / sum(weights) for w in weights)
        )
        if self.samples_per_zone < 1:
            raise ValueError("samples_per_zone must be >= 1")

    def share(self, mode: str) -> float:
        return {"walk": self.walk_share, "bike": self.bike_share}[mode]


def _trajectory_edges(
    graph: nx.Graph, network: MultimodalNetwork, origin_xy: tuple[float, float], dest_xy: tuple[float, float]
) -> list[tuple[str, float]]:
    """Snap a straight-line intent onto the street grid: (edge id, minutes)."""
    o = network.nearest_node(*origin_xy)
    d = network.nearest_node(*dest_xy)
    if o == d or o not in graph or d not in graph:
        return []
    try:
        nodes = nx.dijkstra_path(graph, o, d, weight="time_h")
    except nx.NetworkXNoPath:
        return []
    out = []
    for u, v in zip(nodes, nodes[1:]):
        data = graph[u][v]
        out.append((data["edge_id"], data["time_h"] * 60.0))
    return out


def synthesize_density(
    zones: list[Zone],
    network: MultimodalNetwork,
    profile: TripGenerationProfile,
    replications: int = 50,
    seed: int = 0,
    interval_min: int = 1,
) -> DensityGrid:
    """Street-by-interval count distributions from hypothetical active trips.

    Per replication and zone, sample trajectories (origin in the zone
    disk, departure from the diurnal weights, travel distance and heading
    from the profile), route them along the streets, and occupy every
    traversed street interval with the trip weight. Means and variances
    are taken cell-wise across replications.
    """
    if replications < 2:
        raise ValueError("need at least 2 replications for a variance")
    if interval_min < 1 or MINUTES_PER_DAY % interval_min:
        raise ValueError("interval must be >= 1 minute and divide the day")
    from .planner import _street_graph

    acc: dict[str, dict[tuple[str, int], np.ndarray]] = {
        "walk": {}, "bike": {}
    }
    for mode in ("walk", "bike"):
        graph = _street_graph(network, mode)
        if graph.number_of_edges() == 0:
            warnings.warn(f"no {mode} streets in the network; skipping all zones")
            continue
        cells = acc[mode]
        for zone in zones:
            expected = zone.population * profile.trips_per_capita * profile.share(mode)
            if expected <= 0.0:
                continue
            weight = expected / profile.samples_per_zone
            for rep in range(replications):
                rng = derive_stream(seed, "density", zone.id, mode, rep)
                for _ in range(profile.samples_per_zone):
                    radius = zone.radius_m * math.sqrt(rng.uniform())
                    angle = rng.uniform(0.0, 2.0 * math.pi)
                    origin = (zone.x + radius * math.cos(angle), zone.y + radius * math.sin(angle))
                    if profile.departure_min is not None:
                        depart_min = float(profile.departure_min.sample(rng, 1)[0])
                    else:
                        hour = int(rng.choice(24, p=profile.departure_weights))
                        depart_min = hour * 60.0 + rng.uniform(0.0, 60.0)
                    distance = float(profile.distance_m.sample(rng, 1)[0])
                    heading = float(profile.direction_rad.sample(rng, 1)[0])
                    dest = (
                        origin[0] + distance * math.cos(heading),
                        origin[1] + distance * math.sin(heading),
                    )
                    t = depart_min
                    for edge_id, minutes in _trajectory_edges(graph, network, origin, dest):
                        first = int(math.floor(t)) // interval_min
                        last = int(math.floor(t + minutes)) // interval_min
                        for index in range(first, last + 1):
                            key = (edge_id, index % (MINUTES_PER_DAY // interval_min))
                            if key not in cells:
                                cells[key] = np.zeros(replications)
                            cells[key][rep] += weight
                        t += minutes
    grid_cells: dict[tuple[str, int], DensityCell] = {}
    keys = sorted(set(acc["walk"]) | set(acc["bike"]))
    zero = np.zeros(replications)
    for key in keys:
        walk = acc["walk"].get(key, zero)
        bike = acc["bike"].get(key, zero)
        grid_cells[key] = DensityCell(
            walk_mean=float(walk.mean()),
            walk_var=float(walk.var()),
            bike_mean=float(bike.mean()),
            bike_var=float(bike.var()),
        )
    return DensityGrid(interval_min=interval_min, cells=grid_cells)


@dataclass(frozen=True)
class StopProfile:
    """Load, run-time and infectiousness inputs for one stop-to-stop link."""

    stop: str
    load_mean: float
    load_std: float
    tt_mean_h: float
    tt_std_h: float
    mu_pool: tuple[float, ...]


@dataclass(frozen=True)
class TransitProfiles:
    """Per route, per time-of-day period stop profiles."""

    routes: dict[str, dict[str, tuple[StopProfile, ...]]]

    def get(self, route_id: str, period: str) -> tuple[StopProfile, ...]:
        by_period = self.routes.get(route_id)
        if by_period is None or period not in by_period:
            raise KeyError(f"no transit profile for route {route_id!r}, period {period!r}")
        return by_period[period]


def _stop_popularity(index: int, n_links: int) -> float:
    """Mid-route stops carry more passengers than the ends."""
    if n_links <= 1:
        return 1.0
    x = index / (n_links - 1)
    return 0.25 + 3.0 * x * (1.0 - x)


def synthesize_transit_profiles(
    network: MultimodalNetwork,
    zones: list[Zone],
    demand_scale: float = 20.0,
    seed: int = 0,
    diurnal: dict[str, float] | None = None,
    load_std_frac: float = 0.3,
    tt_std_frac: float = 0.3,
    pool_size: int = 32,
    pool_mix: int = 8,
) -> TransitProfiles:
    """Per-route, per-stop, per-period load and run-time distributions.

    Load means are ``demand_scale * diurnal factor * stop popularity``
    (exactly linear in the demand scale); run times take the network link
    means with a proportional spread; infectiousness pools bootstrap the
    infection rates of zones upstream of each stop.
    """
    if demand_scale < 0:
        raise ValueError("demand scale must be >= 0")
    zone_rate = {z.id: z.infection_rate for z in zones}
    diurnal = diurnal or {p.name: 1.0 for p in network.periods}
    routes: dict[str, dict[str, tuple[StopProfile, ...]]] = {}
    for route in network.routes.values():
        by_period: dict[str, tuple[StopProfile, ...]] = {}
        n_links = len(route.link_tt_h)
        for period in network.periods:
            factor = diurnal.get(period.name, 1.0)
            stops: list[StopProfile] = []
            # every stop gets a profile; vehicles run in both directions,
            # so the terminal stop reuses the last link's run time
            for i, stop in enumerate(route.stops):
                rng = derive_stream(seed, "transit-profile", route.id, period.name, stop)
                upstream = [
                    zone_rate.get(network.nodes[s].zone, 0.0) for s in route.stops[: i + 1]
                ]
                pool = tuple(
                    float(np.mean(rng.choice(upstream, size=pool_mix)))
                    for _ in range(pool_size)
                )
                tt = route.link_tt_h[min(i, n_links - 1)]
                load_mean = demand_scale * factor * _stop_popularity(i, len(route.stops))
                stops.append(
                    StopProfile(
                        stop=stop,
                        load_mean=load_mean,
                        load_std=load_std_frac * load_mean,
                        tt_mean_h=tt,
                        tt_std_h=tt_std_frac * tt,
                        mu_pool=pool,
                    )
                )
            by_period[period.name] = tuple(stops)
        routes[route.id] = by_period
    return TransitProfiles(routes=routes)


@dataclass(frozen=True)
class RidehailProfile:
    """Occupancy mix and shared-ride inputs for ride-hailing segments.

    Synthetic stand-in for fleet data: occupancy weights over {0,1,2,3}
    fellow occupants (driver counts as one), a shared-ride duration
    distribution, and an infectiousness pool for occupants.
    """

    occupancy_weights: tuple[float, float, float, float] = (0.02, 0.68, 0.22, 0.08)
    shared_duration_h: RandomInput = RandomInput.normal(0.15, 0.08)
    p_infectious_pool: tuple[float, ...] = (0.01,)

    def occupancy(self) -> RandomInput:
        return RandomInput.multinomial(self.occupancy_weights)


def synthesize_ridehail_profile(
    seed: int = 0,
    occupancy_weights: tuple[float, float, float, float] = (0.02, 0.68, 0.22, 0.08),
    shared_mean_h: float = 0.15,
    shared_std_h: float = 0.08,
    zones: list[Zone] | None = None,
    pool_size: int = 32,
) -> RidehailProfile:
    """Build the ride-hailing profile, pooling occupant infectiousness from zones."""
    RandomInput.multinomial(occupancy_weights)  # validates the weights
    if zones:
        rng = derive_stream(seed, "ridehail-profile")
        rates = [z.infection_rate for z in zones]
        pool = tuple(float(x) for x in rng.choice(rates, size=pool_size))
    else:
        pool = (0.01,)
    return RidehailProfile(
        occupancy_weights=tuple(float(w) for w in occupancy_weights),
        shared_duration_h=RandomInput.normal(shared_mean_h, shared_std_h),
        p_infectious_pool=pool,
    )
