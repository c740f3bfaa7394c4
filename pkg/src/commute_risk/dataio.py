"""File schemas, validation and persistence for every input and output.

Structured inputs (network, zones, parameters, density, profiles) are
JSON documents with an explicit ``schema_version``; tabular inputs and
outputs (trips, results) are comma-separated text with a header row.
Loaders never crash on malformed bytes: every failure surfaces as a
:class:`SchemaError` naming the file and the offending field.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .network import Edge, MultimodalNetwork, Node, Period, TransitRoute, TripQuery
from .physics import AirborneParams
from .sampling import InvalidDistributionError, RandomInput
from .segments import TravelMode
from .synth import (
    DensityCell,
    DensityGrid,
    RidehailProfile,
    StopProfile,
    TransitProfiles,
    Zone,
)

__all__ = [
    "SchemaError",
    "TouchProbTable",
    "ModeParams",
    "ParameterTable",
    "SegmentResult",
    "ResultRecord",
    "default_parameters",
    "format_probability",
    "parse_depart",
    "parse_endpoint",
    "load_parameters",
    "load_network",
    "load_zones",
    "load_density",
    "load_transit_profiles",
    "load_ridehail_profile",
    "load_trips",
    "load_results",
    "write_parameters",
    "write_network",
    "write_zones",
    "write_density",
    "write_transit_profiles",
    "write_ridehail_profile",
    "write_trips",
    "write_results",
]

SCHEMA_VERSION = 1

INDOOR_MODES = ("transit_rail", "transit_bus", "ride_hailing")
OUTDOOR_MODES = ("walk", "bike")
REQUIRED_SYMBOLS = {
    **{m: ("b", "q", "q_indoor", "gamma", "v_load") for m in INDOOR_MODES},
    **{m: ("b", "q", "v_wind_m_s", "L", "H", "contact_time_s") for m in OUTDOOR_MODES},
}


class SchemaError(ValueError):
    """Input violates its schema; message carries file and field location."""


# ---------------------------------------------------------------------------
# validation helpers


def _read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise SchemaError(f"{path}: cannot read file: {err}") from None
    try:
        return json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise SchemaError(f"{path}: not valid UTF-8 text ({err})") from None
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}:{err.lineno}:{err.colno}: invalid JSON: {err.msg}") from None


def _require(obj: Any, key: str, kind: type | tuple, loc: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(f"{loc}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"{loc}.{key}: missing required field")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaError(f"{loc}.{key}: expected {expected}, got {type(value).__name__}")
    if isinstance(value, float) and not math.isfinite(value):
        raise SchemaError(f"{loc}.{key}: non-finite number")
    return value


def _check_version(doc: Any, loc: str) -> None:
    version = _require(doc, "schema_version", int, loc)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{loc}.schema_version: unsupported version {version}")


def _dump_json(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class TouchProbTable:
    """Monotone bioburden -> per-touch infection probability lookup.

    Linear interpolation between breakpoints; clamped to the last value
    above the table's range. The first breakpoint must be (0, 0).
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise SchemaError("touch_prob_table: must have at least one breakpoint")
        vs = [v for v, _ in self.breakpoints]
        ps = [p for _, p in self.breakpoints]
        if vs[0] != 0.0 or ps[0] != 0.0:
            raise SchemaError("touch_prob_table: first breakpoint must be (0, 0)")
        if any(b <= a for a, b in zip(vs, vs[1:])):
            raise SchemaError("touch_prob_table: bioburden breakpoints must be increasing")
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise SchemaError("touch_prob_table: probabilities must be in [0, 1]")
        if any(b < a for a, b in zip(ps, ps[1:])):
            raise SchemaError("touch_prob_table: probabilities must be non-decreasing")

    def prob(self, bioburden):
        vs = np.array([v for v, _ in self.breakpoints])
        ps = np.array([p for _, p in self.breakpoints])
        return np.interp(bioburden, vs, ps)


@dataclass(frozen=True)
class ModeParams:
    """Distributions for one travel mode, in normalized units (hours, m/h)."""

    air: dict[str, RandomInput]
    gamma: RandomInput | None = None
    v_load: RandomInput | None = None
    contact_time_h: RandomInput | None = None


@dataclass(frozen=True)
class ParameterTable:
    infectious_fraction: float
    travel_time_std_frac: float
    touch_table: TouchProbTable
    modes: dict[str, ModeParams]

    def mode_params(self, mode: TravelMode | str) -> ModeParams:
        key = mode.value if isinstance(mode, TravelMode) else mode
        if key not in self.modes:
            raise SchemaError(f"no parameters declared for mode {key!r}")
        return self.modes[key]

    def air_inputs(self, mode: TravelMode | str) -> dict[str, RandomInput]:
        return dict(self.mode_params(mode).air)

    def air_means(self, mode: TravelMode | str) -> AirborneParams:
        air = self.mode_params(mode).air
        kwargs = {name: spec.mean() for name, spec in air.items()}
        return AirborneParams(**kwargs)

    def touch_prob(self, v_load):
        """Per-touch probability at a raw bioburden (infectious fraction applied)."""
        return self.touch_table.prob(np.asarray(v_load) * self.infectious_fraction)


def _parse_dist(obj: Any, loc: str, scale: float = 1.0) -> RandomInput:
    kind = _require(obj, "dist", str, loc)
    try:
        if kind == "uniform":
            lo = _require(obj, "lo", float, loc) * scale
            hi = _require(obj, "hi", float, loc) * scale
            if lo > hi:
                raise SchemaError(f"{loc}: lo must not exceed hi ({lo} > {hi})")
            return RandomInput.uniform(lo, hi)
        if kind == "normal":
            mean = _require(obj, "mean", float, loc) * scale
            std = _require(obj, "std", float, loc) * scale
            return RandomInput.normal(mean, std)
        if kind == "empirical":
            pool = _require(obj, "pool", list, loc)
            return RandomInput.empirical([float(x) * scale for x in pool])
    except InvalidDistributionError as err:
        raise SchemaError(f"{loc}: {err}") from None
    raise SchemaError(f"{loc}.dist: unknown distribution {kind!r}")


def _dist_doc(spec: RandomInput, scale: float = 1.0) -> dict:
    if spec.kind == "uniform":
        return {"dist": "uniform", "lo": spec.a / scale, "hi": spec.b / scale}
    if spec.kind == "normal":
        return {"dist": "normal", "mean": spec.a / scale, "std": spec.b / scale}
    if spec.kind == "empirical":
        return {"dist": "empirical", "pool": [x / scale for x in spec.pool]}
    raise SchemaError(f"cannot persist distribution kind {spec.kind!r}")


def load_parameters(path: str | Path) -> ParameterTable:
    """Parse and validate the infection-parameter file."""
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    fraction = _require(doc, "infectious_fraction", float, loc)
    if not 0.0 < fraction <= 1.0:
        raise SchemaError(f"{loc}.infectious_fraction: must be in (0, 1]")
    tt_frac = _require(doc, "travel_time_std_frac", float, loc)
    if tt_frac < 0:
        raise SchemaError(f"{loc}.travel_time_std_frac: must be >= 0")
    table_rows = _require(doc, "touch_prob_table", list, loc)
    try:
        table = TouchProbTable(tuple((float(v), float(p)) for v, p in table_rows))
    except (TypeError, ValueError) as err:
        if isinstance(err, SchemaError):
            raise
        raise SchemaError(f"{loc}.touch_prob_table: rows must be [bioburden, prob] pairs") from None
    modes_doc = _require(doc, "modes", dict, loc)
    modes: dict[str, ModeParams] = {}
    for mode, symbols in REQUIRED_SYMBOLS.items():
        mode_loc = f"{loc}.modes.{mode}"
        if mode not in modes_doc:
            raise SchemaError(f"{mode_loc}: missing required mode")
        entry = modes_doc[mode]
        dists: dict[str, RandomInput] = {}
        for symbol in symbols:
            if symbol not in entry:
                raise SchemaError(f"{mode_loc}.{symbol}: missing required symbol for {mode}")
            scale = {"v_wind_m_s": 3600.0, "contact_time_s": 1.0 / 3600.0}.get(symbol, 1.0)
            dists[symbol] = _parse_dist(entry[symbol], f"{mode_loc}.{symbol}", scale)
        air = {"b": dists["b"], "q": dists["q"]}
        if mode in INDOOR_MODES:
            air["q_indoor"] = dists["q_indoor"]
            modes[mode] = ModeParams(air=air, gamma=dists["gamma"], v_load=dists["v_load"])
        else:
            air.update(L=dists["L"], H=dists["H"], v_wind=dists["v_wind_m_s"])
            modes[mode] = ModeParams(air=air, contact_time_h=dists["contact_time_s"])
    return ParameterTable(
        infectious_fraction=fraction,
        travel_time_std_frac=tt_frac,
        touch_table=table,
        modes=modes,
    )


def write_parameters(params: ParameterTable, path: str | Path) -> None:
    modes_doc: dict[str, dict] = {}
    for mode, mp in params.modes.items():
        entry: dict[str, Any] = {}
        for name, spec in mp.air.items():
            if name == "v_wind":
                entry["v_wind_m_s"] = _dist_doc(spec, scale=3600.0)
            else:
                entry[name] = _dist_doc(spec)
        if mp.gamma is not None:
            entry["gamma"] = _dist_doc(mp.gamma)
        if mp.v_load is not None:
            entry["v_load"] = _dist_doc(mp.v_load)
        if mp.contact_time_h is not None:
            entry["contact_time_s"] = _dist_doc(mp.contact_time_h, scale=1.0 / 3600.0)
        modes_doc[mode] = entry
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "infectious_fraction": params.infectious_fraction,
            "travel_time_std_frac": params.travel_time_std_frac,
            "touch_prob_table": [[v, p] for v, p in params.touch_table.breakpoints],
            "modes": modes_doc,
        },
        path,
    )


def default_parameters() -> ParameterTable:
    """The shipped default parameter table."""
    with resources.as_file(
        resources.files("commute_risk").joinpath("data/parameters.json")
    ) as path:
        return load_parameters(path)


# ---------------------------------------------------------------------------
# network


def load_network(path: str | Path) -> MultimodalNetwork:
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    nodes: dict[str, Node] = {}
    for i, item in enumerate(_require(doc, "nodes", list, loc)):
        node_loc = f"{loc}.nodes[{i}]"
        node = Node(
            id=_require(item, "id", str, node_loc),
            x=_require(item, "x", float, node_loc),
            y=_require(item, "y", float, node_loc),
            zone=_require(item, "zone", str, node_loc),
        )
        if node.id in nodes:
            raise SchemaError(f"{node_loc}.id: duplicate node id {node.id!r}")
        nodes[node.id] = node
    edges: dict[str, Edge] = {}
    for i, item in enumerate(_require(doc, "edges", list, loc)):
        edge_loc = f"{loc}.edges[{i}]"
        modes = _require(item, "modes", list, edge_loc)
        edge = Edge(
            id=_require(item, "id", str, edge_loc),
            u=_require(item, "u", str, edge_loc),
            v=_require(item, "v", str, edge_loc),
            modes=frozenset(str(m) for m in modes),
            length_m=_require(item, "length_m", float, edge_loc),
        )
        if edge.id in edges:
            raise SchemaError(f"{edge_loc}.id: duplicate edge id {edge.id!r}")
        for endpoint in (edge.u, edge.v):
            if endpoint not in nodes:
                raise SchemaError(f"{edge_loc}: unknown node {endpoint!r}")
        edges[edge.id] = edge
    periods = []
    for i, item in enumerate(_require(doc, "periods", list, loc)):
        p_loc = f"{loc}.periods[{i}]"
        periods.append(
            Period(
                name=_require(item, "name", str, p_loc),
                start_h=_require(item, "start_h", float, p_loc),
                end_h=_require(item, "end_h", float, p_loc),
            )
        )
    routes: dict[str, TransitRoute] = {}
    for i, item in enumerate(_require(doc, "routes", list, loc)):
        r_loc = f"{loc}.routes[{i}]"
        stops = tuple(str(s) for s in _require(item, "stops", list, r_loc))
        for stop in stops:
            if stop not in nodes:
                raise SchemaError(f"{r_loc}.stops: stop {stop!r} is not a node")
        headways = {
            str(k): float(v) for k, v in _require(item, "headway_h", dict, r_loc).items()
        }
        route = TransitRoute(
            id=_require(item, "id", str, r_loc),
            kind=_require(item, "kind", str, r_loc),
            stops=stops,
            headway_h=headways,
            link_tt_h=tuple(float(t) for t in _require(item, "link_tt_h", list, r_loc)),
        )
        routes[route.id] = route
    speeds = {
        str(k): float(v)
        for k, v in _require(doc, "mode_speeds_m_h", dict, loc).items()
    }
    try:
        return MultimodalNetwork(
            nodes=nodes, edges=edges, routes=routes, periods=tuple(periods), mode_speeds_m_h=speeds
        )
    except ValueError as err:
        raise SchemaError(f"{loc}: {err}") from None


def write_network(network: MultimodalNetwork, path: str | Path) -> None:
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "periods": [
                {"name": p.name, "start_h": p.start_h, "end_h": p.end_h}
                for p in network.periods
            ],
            "mode_speeds_m_h": dict(sorted(network.mode_speeds_m_h.items())),
            "nodes": [
                {"id": n.id, "x": n.x, "y": n.y, "zone": n.zone}
                for n in sorted(network.nodes.values(), key=lambda n: n.id)
            ],
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "modes": sorted(e.modes),
                    "length_m": e.length_m,
                }
                for e in sorted(network.edges.values(), key=lambda e: e.id)
            ],
            "routes": [
                {
                    "id": r.id,
                    "kind": r.kind,
                    "stops": list(r.stops),
                    "headway_h": dict(sorted(r.headway_h.items())),
                    "link_tt_h": list(r.link_tt_h),
                }
                for r in sorted(network.routes.values(), key=lambda r: r.id)
            ],
        },
        path,
    )


# ---------------------------------------------------------------------------
# zones


def load_zones(path: str | Path) -> list[Zone]:
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    zones = []
    seen = set()
    for i, item in enumerate(_require(doc, "zones", list, loc)):
        z_loc = f"{loc}.zones[{i}]"
        try:
            zone = Zone(
                id=_require(item, "id", str, z_loc),
                x=_require(item, "x", float, z_loc),
                y=_require(item, "y", float, z_loc),
                population=_require(item, "population", float, z_loc),
                infection_rate=_require(item, "infection_rate", float, z_loc),
                radius_m=_require(item, "radius_m", float, z_loc),
            )
        except ValueError as err:
            if isinstance(err, SchemaError):
                raise
            raise SchemaError(f"{z_loc}: {err}") from None
        if zone.id in seen:
            raise SchemaError(f"{z_loc}.id: duplicate zone id {zone.id!r}")
        seen.add(zone.id)
        zones.append(zone)
    return zones


def write_zones(zones: Sequence[Zone], path: str | Path) -> None:
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "zones": [
                {
                    "id": z.id,
                    "x": z.x,
                    "y": z.y,
                    "population": z.population,
                    "infection_rate": z.infection_rate,
                    "radius_m": z.radius_m,
                }
                for z in zones
            ],
        },
        path,
    )


# ---------------------------------------------------------------------------
# density grid


def load_density(path: str | Path) -> DensityGrid:
    """Columnar cell rows: [edge index, minute, walk mean/var, bike mean/var]."""
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    interval = _require(doc, "interval_min", int, loc)
    if interval < 1 or 1440 % interval:
        raise SchemaError(f"{loc}.interval_min: must be >= 1 and divide 1440")
    edge_ids = _require(doc, "edges", list, loc)
    cells: dict[tuple[str, int], DensityCell] = {}
    for i, row in enumerate(_require(doc, "cells", list, loc)):
        c_loc = f"{loc}.cells[{i}]"
        if not isinstance(row, list) or len(row) != 6:
            raise SchemaError(f"{c_loc}: expected [edge, interval, wm, wv, bm, bv]")
        try:
            edge = edge_ids[int(row[0])]
            index = int(row[1])
            values = [float(x) for x in row[2:]]
        except (TypeError, ValueError, IndexError) as err:
            raise SchemaError(f"{c_loc}: {err}") from None
        if any(not math.isfinite(v) for v in values):
            raise SchemaError(f"{c_loc}: non-finite number")
        if min(values) < 0:
            raise SchemaError(f"{c_loc}: means and variances must be >= 0")
        if not 0 <= index < 1440 // interval:
            raise SchemaError(f"{c_loc}: interval index out of range")
        cells[(str(edge), index)] = DensityCell(*values)
    return DensityGrid(interval_min=interval, cells=cells)


def write_density(grid: DensityGrid, path: str | Path) -> None:
    edge_ids = sorted({edge for edge, _ in grid.cells})
    index = {edge: i for i, edge in enumerate(edge_ids)}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "interval_min": grid.interval_min,
        "edges": edge_ids,
        "cells": [
            [index[edge], minute, cell.walk_mean, cell.walk_var, cell.bike_mean, cell.bike_var]
            for (edge, minute), cell in sorted(grid.cells.items())
        ],
    }
    Path(path).write_text(
        json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# transit and ride-hailing profiles


def load_transit_profiles(path: str | Path) -> TransitProfiles:
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    routes: dict[str, dict[str, tuple[StopProfile, ...]]] = {}
    for route_id, by_period in _require(doc, "routes", dict, loc).items():
        r_loc = f"{loc}.routes.{route_id}"
        if not isinstance(by_period, dict):
            raise SchemaError(f"{r_loc}: expected an object of periods")
        periods: dict[str, tuple[StopProfile, ...]] = {}
        for period, stops in by_period.items():
            p_loc = f"{r_loc}.{period}"
            if not isinstance(stops, list):
                raise SchemaError(f"{p_loc}: expected a list of stop profiles")
            parsed = []
            for i, item in enumerate(stops):
                s_loc = f"{p_loc}[{i}]"
                pool = tuple(float(x) for x in _require(item, "mu_pool", list, s_loc))
                if not pool:
                    raise SchemaError(f"{s_loc}.mu_pool: must be non-empty")
                if any(not 0.0 <= x <= 1.0 for x in pool):
                    raise SchemaError(f"{s_loc}.mu_pool: values must be in [0, 1]")
                profile = StopProfile(
                    stop=_require(item, "stop", str, s_loc),
                    load_mean=_require(item, "load_mean", float, s_loc),
                    load_std=_require(item, "load_std", float, s_loc),
                    tt_mean_h=_require(item, "tt_mean_h", float, s_loc),
                    tt_std_h=_require(item, "tt_std_h", float, s_loc),
                    mu_pool=pool,
                )
                if profile.load_mean < 0 or profile.load_std < 0:
                    raise SchemaError(f"{s_loc}: load mean/std must be >= 0")
                if profile.tt_mean_h <= 0 or profile.tt_std_h < 0:
                    raise SchemaError(f"{s_loc}: travel time mean must be > 0, std >= 0")
                parsed.append(profile)
            periods[period] = tuple(parsed)
        routes[route_id] = periods
    return TransitProfiles(routes=routes)


def write_transit_profiles(profiles: TransitProfiles, path: str | Path) -> None:
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "routes": {
                route_id: {
                    period: [
                        {
                            "stop": s.stop,
                            "load_mean": s.load_mean,
                            "load_std": s.load_std,
                            "tt_mean_h": s.tt_mean_h,
                            "tt_std_h": s.tt_std_h,
                            "mu_pool": list(s.mu_pool),
                        }
                        for s in stops
                    ]
                    for period, stops in sorted(by_period.items())
                }
                for route_id, by_period in sorted(profiles.routes.items())
            },
        },
        path,
    )


def load_ridehail_profile(path: str | Path) -> RidehailProfile:
    doc = _read_json(path)
    loc = str(path)
    _check_version(doc, loc)
    weights = _require(doc, "occupancy_weights", list, loc)
    try:
        RandomInput.multinomial([float(w) for w in weights])
    except (InvalidDistributionError, TypeError) as err:
        raise SchemaError(f"{loc}.occupancy_weights: {err}") from None
    pool = tuple(float(x) for x in _require(doc, "p_infectious_pool", list, loc))
    if not pool or any(not 0.0 <= x <= 1.0 for x in pool):
        raise SchemaError(f"{loc}.p_infectious_pool: non-empty values in [0, 1] required")
    return RidehailProfile(
        occupancy_weights=tuple(float(w) for w in weights),
        shared_duration_h=_parse_dist(
            _require(doc, "shared_duration_h", dict, loc), f"{loc}.shared_duration_h"
        ),
        p_infectious_pool=pool,
    )


def write_ridehail_profile(profile: RidehailProfile, path: str | Path) -> None:
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "occupancy_weights": list(profile.occupancy_weights),
            "shared_duration_h": _dist_doc(profile.shared_duration_h),
            "p_infectious_pool": list(profile.p_infectious_pool),
        },
        path,
    )


# ---------------------------------------------------------------------------
# trips (tabular)

TRIP_COLUMNS = ("trip_id", "origin", "destination", "depart", "mode", "person_type")


@dataclass(frozen=True)
class TripRow:
    trip_id: str
    query: TripQuery | None
    person_type: str
    error: str = ""


def parse_depart(text: str) -> float:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3) or not all(p.isdigit() for p in parts):
            raise ValueError(f"bad time {text!r}")
        h, m = int(parts[0]), int(parts[1])
        s = int(parts[2]) if len(parts) == 3 else 0
        return h * 3600.0 + m * 60.0 + s
    return float(text)


def parse_endpoint(token: str, zones: Sequence[Zone] | None = None):
    """``node:<id>`` passes through; ``zone:<id>`` resolves to the centroid."""
    token = token.strip()
    if token.startswith("node:"):
        return token[len("node:") :]
    if token.startswith("zone:"):
        zone_id = token[len("zone:") :]
        for zone in zones or ():
            if zone.id == zone_id:
                return (zone.x, zone.y)
        raise ValueError(f"unknown zone {zone_id!r}")
    raise ValueError(f"endpoint must be node:<id> or zone:<id>, got {token!r}")


def load_trips(path: str | Path, zones: Sequence[Zone] | None = None) -> list[TripRow]:
    """Parse the trip batch; invalid rows become error rows, not failures."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise SchemaError(f"{path}: cannot read file: {err}") from None
    except UnicodeDecodeError as err:
        raise SchemaError(f"{path}: not valid UTF-8 text ({err})") from None
    reader = csv.DictReader(io.StringIO(text))
    missing = set(TRIP_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise SchemaError(f"{path}:1: missing columns {sorted(missing)}")
    rows: list[TripRow] = []
    for lineno, record in enumerate(reader, start=2):
        trip_id = (record.get("trip_id") or f"row{lineno}").strip()
        try:
            query = TripQuery(
                origin=parse_endpoint(record["origin"], zones),
                destination=parse_endpoint(record["destination"], zones),
                depart_s=parse_depart(record["depart"]),
                mode=(record["mode"] or "").strip(),
            )
            rows.append(TripRow(trip_id, query, (record.get("person_type") or "").strip()))
        except (ValueError, KeyError) as err:
            rows.append(
                TripRow(trip_id, None, (record.get("person_type") or "").strip(), str(err))
            )
    return rows


def write_trips(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=TRIP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


# ---------------------------------------------------------------------------
# results


def format_probability(x: float) -> str:
    """Fixed formatting for golden files: 6 significant digits, scientific below 1e-4."""
    if x == 0.0:
        return "0"
    if abs(x) < 1e-4:
        return f"{x:.5e}"
    return f"{x:.6g}"


@dataclass(frozen=True)
class SegmentResult:
    mode: str
    contact_mean: float
    contact_var: float
    surface_mean: float
    surface_var: float
    duration_h: float


@dataclass(frozen=True)
class ResultRecord:
    trip_id: str
    status: str  # "ok" | "no_path" | "error"
    mode: str
    mean: float = 0.0
    std_error: float = 0.0
    contact_total: float = 0.0
    surface_total: float = 0.0
    segments: tuple[SegmentResult, ...] = ()
    warnings: tuple[str, ...] = ()
    message: str = ""

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ValueError("standard error must be >= 0")


RESULT_COLUMNS = (
    "trip_id",
    "status",
    "mode",
    "mean_probability",
    "std_error",
    "contact_total",
    "surface_total",
    "n_segments",
    "segments",
    "warnings",
    "message",
)


def _record_row(record: ResultRecord) -> dict[str, str]:
    segments = "|".join(
        f"{s.mode}:{format_probability(s.contact_mean)}:{format_probability(s.surface_mean)}"
        for s in record.segments
    )
    return {
        "trip_id": record.trip_id,
        "status": record.status,
        "mode": record.mode,
        "mean_probability": format_probability(record.mean),
        "std_error": format_probability(record.std_error),
        "contact_total": format_probability(record.contact_total),
        "surface_total": format_probability(record.surface_total),
        "n_segments": str(len(record.segments)),
        "segments": segments,
        "warnings": ";".join(record.warnings),
        "message": record.message,
    }


def results_csv_text(records: Sequence[ResultRecord]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(_record_row(record))
    return out.getvalue()


def record_to_doc(record: ResultRecord) -> dict:
    return {
        "trip_id": record.trip_id,
        "status": record.status,
        "mode": record.mode,
        "mean_probability": record.mean,
        "std_error": record.std_error,
        "contact_total": record.contact_total,
        "surface_total": record.surface_total,
        "segments": [
            {
                "mode": s.mode,
                "contact_mean": s.contact_mean,
                "contact_var": s.contact_var,
                "surface_mean": s.surface_mean,
                "surface_var": s.surface_var,
                "duration_h": s.duration_h,
            }
            for s in record.segments
        ],
        "warnings": list(record.warnings),
        "message": record.message,
    }


def write_results(
    records: Sequence[ResultRecord], path: str | Path, format: str = "csv"
) -> None:
    """Persist result records as CSV (fixed formatting) or structured JSON."""
    if format == "csv":
        Path(path).write_text(results_csv_text(records), encoding="utf-8")
    elif format == "structured":
        _dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "results": [record_to_doc(r) for r in records],
            },
            path,
        )
    else:
        raise ValueError(f"unknown result format {format!r}")


def load_results(path: str | Path) -> list[dict]:
    """Read back results (either format) as row dictionaries for analysis."""
    path = Path(path)
    if path.suffix == ".json":
        doc = _read_json(path)
        _check_version(doc, str(path))
        return [
            {
                "trip_id": r["trip_id"],
                "status": r["status"],
                "mode": r["mode"],
                "mean_probability": float(r["mean_probability"]),
                "std_error": float(r["std_error"]),
            }
            for r in doc["results"]
        ]
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise SchemaError(f"{path}: cannot read file: {err}") from None
    reader = csv.DictReader(io.StringIO(text))
    missing = {"trip_id", "status", "mode", "mean_probability", "std_error"} - set(
        reader.fieldnames or ()
    )
    if missing:
        raise SchemaError(f"{path}:1: missing columns {sorted(missing)}")
    rows = []
    for lineno, record in enumerate(reader, start=2):
        try:
            rows.append(
                {
                    "trip_id": record["trip_id"],
                    "status": record["status"],
                    "mode": record["mode"],
                    "mean_probability": float(record["mean_probability"]),
                    "std_error": float(record["std_error"]),
                }
            )
        except (ValueError, KeyError) as err:
            raise SchemaError(f"{path}:{lineno}: {err}") from None
    return rows
