"""Shipped synthetic city: 20 zones, a street grid, 3 transit routes.

Deterministic given a seed, sized so that a full 500-trip batch with
bootstrap errors runs in minutes on a laptop. Loads peak in the morning
and evening; infection rates vary by zone; one central campus zone
receives all demo commutes.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .dataio import (
    write_density,
    write_network,
    write_parameters,
    write_ridehail_profile,
    write_transit_profiles,
    write_trips,
    write_zones,
    default_parameters,
)
from .network import Edge, MultimodalNetwork, Node, Period, TransitRoute
from .sampling import RandomInput, derive_stream
from .synth import (
    TripGenerationProfile,
    Zone,
    synthesize_density,
    synthesize_ridehail_profile,
    synthesize_transit_profiles,
)

__all__ = ["DEMO_SEED", "PEAK_WINDOWS", "demo_zones", "demo_network", "demo_trips", "generate_demo"]

DEMO_SEED = 20260810
GRID_N = 21  # 21x21 nodes, 800 m spacing, 16 km side
GRID_STEP = 800.0
CAMPUS_ZONE = "z01"

PERIODS = (
    Period("overnight", 0.0, 6.0),
    Period("am_peak", 6.0, 9.5),
    Period("midday", 9.5, 15.5),
    Period("pm_peak", 15.5, 19.0),
    Period("evening", 19.0, 24.0),
)
DIURNAL = {"overnight": 0.15, "am_peak": 2.2, "midday": 0.9, "pm_peak": 2.0, "evening": 0.5}
PEAK_WINDOWS = ((6.0, 9.5), (15.5, 19.0))

MODE_SPEEDS = {"walk": 4800.0, "bike": 14000.0, "drive": 28000.0}


def _node_id(i: int, j: int) -> str:
    return f"n{i:02d}_{j:02d}"


def _coord(i: int) -> float:
    return (i - (GRID_N - 1) / 2) * GRID_STEP


def demo_zones(seed: int = DEMO_SEED) -> list[Zone]:
    """Campus zone at the centre plus 19 residential zones on rings."""
    rng = derive_stream(seed, "zones")
    zones = [Zone(CAMPUS_ZONE, 0.0, 0.0, population=1200.0, infection_rate=0.008, radius_m=700.0)]
    # the outer ring's diagonal zones sit beyond the 10 km walking limit
    # (grid distance), so walk sweeps show no-path markers there
    ring_radii = (2400.0, 4800.0, 7600.0)
    counts = (5, 6, 8)
    k = 2
    for radius, count in zip(ring_radii, counts):
        for step in range(count):
            angle = 2.0 * math.pi * step / count + (0.3 if count == 6 else 0.0)
            zones.append(
                Zone(
                    id=f"z{k:02d}",
                    x=round(radius * math.cos(angle), 1),
                    y=round(radius * math.sin(angle), 1),
                    population=float(int(rng.uniform(2500, 9000))),
                    infection_rate=round(float(rng.uniform(0.004, 0.02)), 6),
                    radius_m=900.0,
                )
            )
            k += 1
    return zones


def demo_network(zones: list[Zone] | None = None) -> MultimodalNetwork:
    zones = zones or demo_zones()

    def nearest_zone(x: float, y: float) -> str:
        return min(zones, key=lambda z: ((z.x - x) ** 2 + (z.y - y) ** 2, z.id)).id

    nodes: dict[str, Node] = {}
    for i in range(GRID_N):
        for j in range(GRID_N):
            x, y = _coord(i), _coord(j)
            node = Node(_node_id(i, j), x, y, nearest_zone(x, y))
            nodes[node.id] = node
    edges: dict[str, Edge] = {}
    modes = frozenset(MODE_SPEEDS)
    for i in range(GRID_N):
        for j in range(GRID_N):
            if i + 1 < GRID_N:
                eid = f"e_{_node_id(i, j)}_{_node_id(i + 1, j)}"
                edges[eid] = Edge(eid, _node_id(i, j), _node_id(i + 1, j), modes, GRID_STEP)
            if j + 1 < GRID_N:
                eid = f"e_{_node_id(i, j)}_{_node_id(i, j + 1)}"
                edges[eid] = Edge(eid, _node_id(i, j), _node_id(i, j + 1), modes, GRID_STEP)

    mid = (GRID_N - 1) // 2
    rail_stops = tuple(_node_id(i, mid) for i in range(0, GRID_N, 2))
    bus_ns_stops = tuple(_node_id(mid, j) for j in range(0, GRID_N, 2))
    bus_diag_stops = tuple(_node_id(i, i) for i in range(0, GRID_N, 2))
    routes = {
        "rail_ew": TransitRoute(
            id="rail_ew",
            kind="rail",
            stops=rail_stops,
            headway_h={
                "overnight": 0.5, "am_peak": 0.1, "midday": 0.15, "pm_peak": 0.1, "evening": 0.25,
            },
            link_tt_h=(round(2 * GRID_STEP / 36000.0, 6),) * (len(rail_stops) - 1),
        ),
        "bus_ns": TransitRoute(
            id="bus_ns",
            kind="bus",
            stops=bus_ns_stops,
            headway_h={
                "overnight": 0.6, "am_peak": 0.17, "midday": 0.25, "pm_peak": 0.17, "evening": 0.4,
            },
            link_tt_h=(round(2 * GRID_STEP / 16000.0, 6),) * (len(bus_ns_stops) - 1),
        ),
        "bus_diag": TransitRoute(
            id="bus_diag",
            kind="bus",
            stops=bus_diag_stops,
            headway_h={
                "overnight": 0.6, "am_peak": 0.2, "midday": 0.3, "pm_peak": 0.2, "evening": 0.5,
            },
            link_tt_h=(round(2 * GRID_STEP * math.sqrt(2.0) / 16000.0, 6),) * (len(bus_diag_stops) - 1),
        ),
    }
    return MultimodalNetwork(
        nodes=nodes, edges=edges, routes=routes, periods=PERIODS, mode_speeds_m_h=dict(MODE_SPEEDS)
    )


def demo_trip_profile() -> TripGenerationProfile:
    weights = [0.2] * 24
    for h in (7, 8):
        weights[h] = 2.6
    for h in (9, 12, 13):
        weights[h] = 1.2
    for h in (17, 18):
        weights[h] = 2.4
    return TripGenerationProfile(
        trips_per_capita=0.35,
        walk_share=0.55,
        bike_share=0.35,
        departure_weights=tuple(weights),
        distance_m=RandomInput.normal(2500.0, 1200.0),
        samples_per_zone=96,
    )


def demo_trips(zones: list[Zone], n: int = 500, seed: int = DEMO_SEED) -> list[dict]:
    """Synthetic commuter batch toward the campus zone."""
    rng = derive_stream(seed, "trips")
    mode_names = ("transit", "drive", "walk", "bike", "ride_hailing")
    mode_weights = np.array([0.44, 0.26, 0.12, 0.10, 0.08])
    residential = [z for z in zones if z.id != CAMPUS_ZONE]
    populations = np.array([z.population for z in residential])
    pop_weights = populations / populations.sum()
    person_types = ("faculty", "staff", "student")
    person_weights = np.array([0.15, 0.45, 0.40])
    rows = []
    for i in range(n):
        mode = str(rng.choice(mode_names, p=mode_weights))
        zone = residential[int(rng.choice(len(residential), p=pop_weights))]
        if mode in ("walk", "bike"):
            # active commutes come from closer in
            near = [z for z in residential if math.hypot(z.x, z.y) <= 5500.0]
            zone = near[int(rng.integers(0, len(near)))]
        if rng.uniform() < 0.62:
            depart_h = float(np.clip(rng.normal(7.9, 0.8), 5.0, 11.0))
        else:
            depart_h = float(rng.uniform(5.5, 23.0))
        depart_s = int(depart_h * 3600.0)
        rows.append(
            {
                "trip_id": f"t{i:04d}",
                "origin": f"zone:{zone.id}",
                "destination": f"zone:{CAMPUS_ZONE}",
                "depart": f"{depart_s // 3600:02d}:{depart_s % 3600 // 60:02d}",
                "mode": mode,
                "person_type": str(rng.choice(person_types, p=person_weights)),
            }
        )
    return rows


def generate_demo(
    out_dir: str | Path,
    seed: int = DEMO_SEED,
    n_trips: int = 500,
    density_replications: int = 20,
    profile: TripGenerationProfile | None = None,
) -> Path:
    """Write the full demo data bundle (plus trips.csv) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    zones = demo_zones(seed)
    network = demo_network(zones)
    write_zones(zones, out / "zones.json")
    write_network(network, out / "network.json")
    write_parameters(default_parameters(), out / "parameters.json")
    density = synthesize_density(
        zones, network, profile or demo_trip_profile(), replications=density_replications,
        seed=seed, interval_min=30,
    )
    write_density(density, out / "density.json")
    profiles = synthesize_transit_profiles(
        network, zones, demand_scale=26.0, seed=seed, diurnal=DIURNAL, load_std_frac=0.35
    )
    write_transit_profiles(profiles, out / "transit_profiles.json")
    ridehail = synthesize_ridehail_profile(
        seed=seed, occupancy_weights=(0.03, 0.62, 0.25, 0.10),
        shared_mean_h=0.12, shared_std_h=0.06, zones=zones,
    )
    write_ridehail_profile(ridehail, out / "ridehail_profile.json")
    write_trips(demo_trips(zones, n=n_trips, seed=seed), out / "trips.csv")
    return out
