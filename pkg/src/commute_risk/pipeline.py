"""End-to-end trip evaluation: plan, build exposures, estimate risk and error.

For each planned path the pipeline turns profile data into declared
random inputs per segment, runs the per-mode bootstrap procedures on
streams derived from (seed, trip, path, segment), and composes the
results into a trip-level estimate. All evaluation is deterministic
given the seed and independent of execution order, so batches can be
sharded across workers freely.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from .dataio import (
    ParameterTable,
    ResultRecord,
    SegmentResult,
    TripRow,
    load_density,
    load_network,
    load_parameters,
    load_ridehail_profile,
    load_transit_profiles,
    load_zones,
)
from .network import MultimodalNetwork, TripQuery
from .physics import ApproximationBreakdownWarning
from .planner import ChoiceModel, NoPathError, Path, PlannerConfig, choose, plan, with_commonality
from .sampling import RandomInput, derive_stream
from .segments import TravelMode
from .synth import DensityGrid, RidehailProfile, TransitProfiles, Zone
from .uncertainty import (
    BootstrapConfig,
    PathUncertainty,
    SegmentUncertainty,
    UncertainRiskEstimate,
    active_segment_variance,
    ridehail_segment_variance,
    surface_variance,
    transit_segment_variance,
    trip_variance,
)

__all__ = ["DataBundle", "PathEvaluation", "TripEvaluation", "DataMissingError", "evaluate_trip", "evaluate_batch"]

BUNDLE_FILES = (
    "network.json",
    "zones.json",
    "parameters.json",
    "density.json",
    "transit_profiles.json",
    "ridehail_profile.json",
)


class DataMissingError(Exception):
    """The loaded bundle lacks data this evaluation needs."""


@dataclass
class DataBundle:
    """Everything a risk evaluation reads, loaded once and immutable."""

    network: MultimodalNetwork
    zones: list[Zone]
    params: ParameterTable
    density: DensityGrid
    transit_profiles: TransitProfiles
    ridehail_profile: RidehailProfile
    fingerprint: str = ""
    zone_rate: dict[str, float] = field(init=False)

    def __post_init__(self) -> None:
        self.zone_rate = {z.id: z.infection_rate for z in self.zones}

    @staticmethod
    def load(data_dir: str | FsPath) -> "DataBundle":
        data_dir = FsPath(data_dir)
        digest = hashlib.sha256()
        for name in BUNDLE_FILES:
            path = data_dir / name
            if not path.exists():
                raise DataMissingError(f"missing data file {path}")
            digest.update(name.encode())
            digest.update(path.read_bytes())
        return DataBundle(
            network=load_network(data_dir / "network.json"),
            zones=load_zones(data_dir / "zones.json"),
            params=load_parameters(data_dir / "parameters.json"),
            density=load_density(data_dir / "density.json"),
            transit_profiles=load_transit_profiles(data_dir / "transit_profiles.json"),
            ridehail_profile=load_ridehail_profile(data_dir / "ridehail_profile.json"),
            fingerprint=digest.hexdigest(),
        )


@dataclass(frozen=True)
class SegmentEvaluation:
    mode: str
    duration_h: float
    contact: tuple[float, float]  # (mean, variance)
    surface: tuple[float, float]

    def to_uncertainty(self) -> SegmentUncertainty:
        return SegmentUncertainty(
            mean_contact=self.contact[0],
            var_contact=self.contact[1],
            mean_surface=self.surface[0],
            var_surface=self.surface[1],
        )


@dataclass(frozen=True)
class PathEvaluation:
    path: Path
    choice_prob: float
    segments: tuple[SegmentEvaluation, ...]

    @property
    def mean(self) -> float:
        return min(math.fsum(s.contact[0] + s.surface[0] for s in self.segments), 1.0)

    @property
    def variance(self) -> float:
        return math.fsum(s.contact[1] + s.surface[1] for s in self.segments)

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class TripEvaluation:
    query: TripQuery
    estimate: UncertainRiskEstimate
    paths: tuple[PathEvaluation, ...]
    warnings: tuple[str, ...]

    def to_record(self, trip_id: str) -> ResultRecord:
        segments = tuple(
            SegmentResult(
                mode=s.mode,
                contact_mean=s.contact[0],
                contact_var=s.contact[1],
                surface_mean=s.surface[0],
                surface_var=s.surface[1],
                duration_h=s.duration_h,
            )
            for p in self.paths
            for s in p.segments
        )
        contact_total = math.fsum(
            p.choice_prob * math.fsum(s.contact[0] for s in p.segments) for p in self.paths
        )
        surface_total = math.fsum(
            p.choice_prob * math.fsum(s.surface[0] for s in p.segments) for p in self.paths
        )
        return ResultRecord(
            trip_id=trip_id,
            status="ok",
            mode=self.query.mode,
            mean=self.estimate.mean,
            std_error=self.estimate.std_error,
            contact_total=contact_total,
            surface_total=surface_total,
            segments=segments,
            warnings=self.warnings,
        )


def _segment_start_hours(path: Path, query: TripQuery, network: MultimodalNetwork) -> list[float]:
    """Clock hour at which each risk segment begins (waits included)."""
    t = query.depart_h
    period = network.period_at(query.depart_h)
    starts = []
    for seg in path.segments:
        if seg.mode.is_transit and seg.route is not None:
            headway = network.routes[seg.route].headway_h.get(period.name, 0.0)
            t += headway / 2.0
        starts.append(t)
        t += seg.duration
    return starts


def _touch_prob_input(params: ParameterTable, v_load: RandomInput):
    """Sequential draw: bioburden first, then the per-touch probability."""

    def draw(rng: np.random.Generator, size: int, _drawn) -> np.ndarray:
        v = v_load.sample(rng, size)
        return np.asarray(params.touch_prob(v), dtype=float)

    return draw


def _transit_exposure(
    seg, bundle: DataBundle, query: TripQuery
) -> tuple[list[dict[str, RandomInput]], dict[str, RandomInput]]:
    period = bundle.network.period_at(query.depart_h)
    try:
        profile_stops = bundle.transit_profiles.get(seg.route, period.name)
    except KeyError as err:
        raise DataMissingError(str(err)) from None
    by_stop = {p.stop: p for p in profile_stops}
    stops = []
    for stop in seg.geometry[:-1]:  # final alighting stop carries no link
        profile = by_stop.get(stop)
        if profile is None:
            raise DataMissingError(
                f"no stop profile for {stop!r} on route {seg.route!r} in period {period.name!r}"
            )
        stops.append(
            {
                "load": RandomInput.normal(profile.load_mean, profile.load_std, integral=True),
                "mu": RandomInput.empirical(profile.mu_pool),
                "tt": RandomInput.normal(profile.tt_mean_h, profile.tt_std_h),
            }
        )
    air = bundle.params.air_inputs(seg.mode)
    return stops, air


def _active_exposure(
    seg, bundle: DataBundle, start_h: float
) -> tuple[RandomInput, RandomInput, RandomInput, dict[str, RandomInput]]:
    network = bundle.network
    street_mode = seg.mode.value
    mean_total = 0.0
    var_total = 0.0
    t_min = start_h * 60.0
    rates: list[float] = []
    for edge_id in seg.geometry:
        edge = network.edges[edge_id]
        mean, var = bundle.density.lookup(edge_id, int(t_min) % 1440, street_mode)
        mean_total += mean
        var_total += var
        rates.append(bundle.zone_rate.get(network.nodes[edge.u].zone, 0.0))
        rates.append(bundle.zone_rate.get(network.nodes[edge.v].zone, 0.0))
        t_min += network.edge_time_h(edge, street_mode) * 60.0
    encounters = RandomInput.normal(mean_total, math.sqrt(var_total), integral=True)
    # the average infectiousness of a whole encounter set mixes people from
    # several zones, so pool entries are windowed means of the rates en route
    rates = rates or [0.0]
    window = min(8, len(rates))
    pool = [
        float(np.mean([rates[(i + j) % len(rates)] for j in range(window)]))
        for i in range(len(rates))
    ]
    mu = RandomInput.empirical(pool)
    mode_params = bundle.params.mode_params(seg.mode)
    if mode_params.contact_time_h is None:
        raise DataMissingError(f"no contact-time distribution for {seg.mode.value}")
    return encounters, mu, mode_params.contact_time_h, bundle.params.air_inputs(seg.mode)


def _surface_inputs(
    seg, bundle: DataBundle, duration: RandomInput
) -> tuple[RandomInput, RandomInput, object]:
    mode_params = bundle.params.mode_params(seg.mode)
    if mode_params.gamma is None or mode_params.v_load is None:
        raise DataMissingError(f"no fomite parameters for {seg.mode.value}")
    return mode_params.gamma, duration, _touch_prob_input(bundle.params, mode_params.v_load)


def _evaluate_segment(
    seg,
    bundle: DataBundle,
    query: TripQuery,
    start_h: float,
    config: BootstrapConfig,
    stream_key: tuple,
) -> SegmentEvaluation:
    seed = config.seed
    contact_rng = derive_stream(seed, *stream_key, "contact")
    surface_rng = derive_stream(seed, *stream_key, "surface")
    frac = bundle.params.travel_time_std_frac
    if seg.mode is TravelMode.DRIVE:
        contact, surface = (0.0, 0.0), (0.0, 0.0)
    elif seg.mode.is_transit:
        stops, air = _transit_exposure(seg, bundle, query)
        contact = transit_segment_variance(stops, air, config, rng=contact_rng)
        duration = RandomInput.normal(
            sum(s["tt"].a for s in stops),
            math.sqrt(sum(s["tt"].b ** 2 for s in stops)),
        )
        surface = surface_variance(*_surface_inputs(seg, bundle, duration), config, rng=surface_rng)
    elif seg.mode in (TravelMode.WALK, TravelMode.BIKE):
        encounters, mu, contact_time, air = _active_exposure(seg, bundle, start_h)
        contact = active_segment_variance(encounters, mu, contact_time, air, config, rng=contact_rng)
        surface = (0.0, 0.0)
    elif seg.mode is TravelMode.RIDE_HAILING:
        profile = bundle.ridehail_profile
        duration = RandomInput.normal(seg.duration, frac * seg.duration)
        contact = ridehail_segment_variance(
            occupancy=profile.occupancy(),
            duration=duration,
            shared_duration=profile.shared_duration_h,
            p_infectious=RandomInput.empirical(profile.p_infectious_pool),
            air=bundle.params.air_inputs(seg.mode),
            config=config,
            rng=contact_rng,
        )
        surface = surface_variance(*_surface_inputs(seg, bundle, duration), config, rng=surface_rng)
    else:
        raise DataMissingError(f"unsupported mode {seg.mode!r}")
    return SegmentEvaluation(
        mode=seg.mode.value, duration_h=seg.duration, contact=contact, surface=surface
    )


def evaluate_trip(
    query: TripQuery,
    bundle: DataBundle,
    k: int = 1,
    config: BootstrapConfig = BootstrapConfig(),
    planner_config: PlannerConfig = PlannerConfig(),
    choice_model: ChoiceModel = ChoiceModel(),
    trip_id: str = "trip",
) -> TripEvaluation:
    """Plan the trip and estimate its infection probability and standard error."""
    paths = with_commonality(plan(query, bundle.network, k, planner_config))
    probs = choose(paths, choice_model)
    collected: list[str] = []
    evaluations: list[PathEvaluation] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ApproximationBreakdownWarning)
        for path_idx, (path, prob) in enumerate(zip(paths, probs)):
            starts = _segment_start_hours(path, query, bundle.network)
            seg_evals = tuple(
                _evaluate_segment(
                    seg,
                    bundle,
                    query,
                    start_h,
                    config,
                    ("trip", trip_id, "path", path_idx, "segment", seg_idx),
                )
                for seg_idx, (seg, start_h) in enumerate(zip(path.segments, starts))
            )
            evaluations.append(PathEvaluation(path=path, choice_prob=float(prob), segments=seg_evals))
    collected.extend(str(w.message) for w in caught if issubclass(w.category, ApproximationBreakdownWarning))
    estimate = trip_variance(
        [
            PathUncertainty(e.choice_prob, tuple(s.to_uncertainty() for s in e.segments))
            for e in evaluations
        ],
        mode=config.mode,
        samples=config.samples,
    )
    return TripEvaluation(
        query=query,
        estimate=estimate,
        paths=tuple(evaluations),
        warnings=tuple(collected),
    )


def evaluate_batch(
    rows: Sequence[TripRow],
    bundle: DataBundle,
    k: int = 1,
    config: BootstrapConfig = BootstrapConfig(),
    planner_config: PlannerConfig = PlannerConfig(),
    workers: int = 1,
) -> list[ResultRecord]:
    """One result record per input row; failures become error rows.

    Worker count never changes the output: every trip's streams derive
    from (seed, trip id) and rows are emitted in input order.
    """

    def evaluate_row(row: TripRow) -> ResultRecord:
        if row.query is None:
            return ResultRecord(
                trip_id=row.trip_id, status="error", mode="", message=row.error
            )
        try:
            evaluation = evaluate_trip(
                row.query, bundle, k=k, config=config,
                planner_config=planner_config, trip_id=row.trip_id,
            )
            return evaluation.to_record(row.trip_id)
        except NoPathError as err:
            return ResultRecord(
                trip_id=row.trip_id, status="no_path", mode=row.query.mode, message=str(err)
            )
        except DataMissingError as err:
            return ResultRecord(
                trip_id=row.trip_id, status="error", mode=row.query.mode, message=str(err)
            )

    if workers <= 1:
        return [evaluate_row(row) for row in rows]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate_row, rows))
