"""Mode-specific segment risk and its integration into path and trip risk.

A segment is a maximal stretch of travel with one mode; transit transfers
always start a new segment. Each mode contributes through up to two
channels: close contact (mode-specific encounter structure) and surface
touching (transit and ride-hailing only). Driving contributes nothing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .physics import (
    AirborneParams,
    ApproximationBreakdownWarning,
    ConfigurationError,
    FomiteParams,
    contact_infection_prob,
    first_order_sum,
    fomite_infection_prob,
    survival_complement,
)

__all__ = [
    "TravelMode",
    "TransitLeg",
    "ActiveLeg",
    "Occupant",
    "RideHailLeg",
    "ExposureContext",
    "Segment",
    "RiskBreakdown",
    "transit_contact_risk",
    "active_contact_risk",
    "ridehail_contact_risk",
    "segment_contact_risk",
    "segment_surface_risk",
    "path_risk",
    "trip_risk",
]


class TravelMode(str, Enum):
    TRANSIT_BUS = "transit_bus"
    TRANSIT_RAIL = "transit_rail"
    WALK = "walk"
    BIKE = "bike"
    RIDE_HAILING = "ride_hailing"
    DRIVE = "drive"

    @property
    def is_transit(self) -> bool:
        return self in (TravelMode.TRANSIT_BUS, TravelMode.TRANSIT_RAIL)

    @property
    def has_surface_channel(self) -> bool:
        return self.is_transit or self is TravelMode.RIDE_HAILING


@dataclass(frozen=True)
class TransitLeg:
    """Stop-by-stop ride on one vehicle, excluding the final alighting stop.

    Parallel tuples: per-stop onboard count (excluding the traveller),
    mean infectious probability of those onboard, and travel time to the
    next stop in hours.
    """

    stops: tuple[str, ...]
    tt: tuple[float, ...]
    load: tuple[float, ...]
    mu: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.stops)
        if n < 1:
            raise ConfigurationError("transit leg needs at least one stop")
        if not (len(self.tt) == len(self.load) == len(self.mu) == n):
            raise ConfigurationError("per-stop tuples must have equal length")
        if any(t <= 0 or not math.isfinite(t) for t in self.tt):
            raise ConfigurationError("per-stop travel times must be > 0")
        if any(x < 0 for x in self.load):
            raise ConfigurationError("onboard counts must be >= 0")
        if any(not 0.0 <= m <= 1.0 for m in self.mu):
            raise ConfigurationError("mean infectious probabilities must be in [0, 1]")


@dataclass(frozen=True)
class ActiveLeg:
    """Street-level encounters on a walk or bike segment."""

    encounters: float
    mu: float
    contact_duration: float

    def __post_init__(self) -> None:
        if self.encounters < 0:
            raise ConfigurationError("encounter count must be >= 0")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigurationError("mu must be in [0, 1]")
        if self.contact_duration < 0:
            raise ConfigurationError("contact duration must be >= 0")


@dataclass(frozen=True)
class Occupant:
    role: str  # "driver" | "rider"
    p_infectious: float
    shared_duration: float

    def __post_init__(self) -> None:
        if self.role not in ("driver", "rider"):
            raise ConfigurationError(f"unknown occupant role {self.role!r}")
        if not 0.0 <= self.p_infectious <= 1.0:
            raise ConfigurationError("p_infectious must be in [0, 1]")
        if self.shared_duration < 0:
            raise ConfigurationError("shared duration must be >= 0")


@dataclass(frozen=True)
class RideHailLeg:
    """Driver plus up to two shared riders in the vehicle."""

    occupants: tuple[Occupant, ...]

    def __post_init__(self) -> None:
        if len(self.occupants) > 3:
            raise ConfigurationError("at most 3 occupants (1 driver + 2 riders)")
        if sum(1 for o in self.occupants if o.role == "driver") > 1:
            raise ConfigurationError("at most one driver")
        if sum(1 for o in self.occupants if o.role == "rider") > 2:
            raise ConfigurationError("at most two riders")


Leg = Union[TransitLeg, ActiveLeg, RideHailLeg]


@dataclass(frozen=True)
class ExposureContext:
    """Physical environment plus contact and fomite inputs for one segment."""

    air: AirborneParams | None = None
    fomite: FomiteParams | None = None
    leg: Leg | None = None


@dataclass(frozen=True)
class Segment:
    """Continuous travel with a single mode."""

    mode: TravelMode
    duration: float
    geometry: tuple[str, ...] = ()
    exposure: ExposureContext = ExposureContext()
    route: str | None = None

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ConfigurationError("segment duration must be >= 0")
        leg = self.exposure.leg
        if isinstance(leg, RideHailLeg):
            for o in leg.occupants:
                if o.role == "driver" and abs(o.shared_duration - self.duration) > 1e-9:
                    raise ConfigurationError("driver shares the whole segment duration")
                if o.shared_duration > self.duration + 1e-9:
                    raise ConfigurationError("rider shared duration cannot exceed the segment")


@dataclass(frozen=True)
class RiskBreakdown:
    """Per-segment channel probabilities and their composition for one path."""

    per_segment: tuple[tuple[float, float], ...]  # (contact, surface) per segment
    total: float
    contact_total: float
    surface_total: float
    mode: str


def transit_contact_risk(
    leg: TransitLeg, air: AirborneParams, mode: str = "first_order"
) -> float:
    """Close-contact risk across all stop-to-stop links of a transit segment."""
    per_stop_pc = [contact_infection_prob(air, tt, "indoor") for tt in leg.tt]
    if mode == "exact":
        per_stop = [
            _identical_contacts_exact(n, m * pc)
            for n, m, pc in zip(leg.load, leg.mu, per_stop_pc)
        ]
        return survival_complement(per_stop)
    if mode == "first_order":
        return first_order_sum(
            (n * m * pc for n, m, pc in zip(leg.load, leg.mu, per_stop_pc)),
            where="transit_contact_risk",
        )
    raise ConfigurationError(f"unknown mode {mode!r}")


def _identical_contacts_exact(count: float, event_prob: float) -> float:
    """``1 - (1 - p)**count`` for ``count`` identical independent encounters."""
    if count == 0.0 or event_prob == 0.0:
        return 0.0
    if event_prob >= 1.0:
        return 1.0
    if count == 1.0:
        return event_prob
    return -math.expm1(count * math.log1p(-event_prob))


def active_contact_risk(
    leg: ActiveLeg, air: AirborneParams, mode: str = "first_order"
) -> float:
    """Close-contact risk for a walk or bike segment.

    Encounters are treated as independent, identically exposed contacts of
    the leg's average contact duration in the outdoor airshed.
    """
    pc = contact_infection_prob(air, leg.contact_duration, "outdoor")
    if mode == "exact":
        return _identical_contacts_exact(leg.encounters, leg.mu * pc)
    if mode == "first_order":
        return first_order_sum([leg.encounters * leg.mu * pc], where="active_contact_risk")
    raise ConfigurationError(f"unknown mode {mode!r}")


def ridehail_contact_risk(
    leg: RideHailLeg, air: AirborneParams, mode: str = "first_order"
) -> float:
    """Close-contact risk from the driver and any shared riders."""
    events = [
        o.p_infectious * contact_infection_prob(air, o.shared_duration, "indoor")
        for o in leg.occupants
    ]
    if mode == "exact":
        return survival_complement(events)
    if mode == "first_order":
        return first_order_sum(events, where="ridehail_contact_risk")
    raise ConfigurationError(f"unknown mode {mode!r}")


def segment_contact_risk(seg: Segment, mode: str = "first_order") -> float:
    """Dispatch the contact channel by travel mode; driving is exactly zero."""
    if seg.mode is TravelMode.DRIVE:
        return 0.0
    leg = seg.exposure.leg
    air = seg.exposure.air
    if leg is None or air is None:
        raise ConfigurationError(f"{seg.mode.value} segment is missing exposure data")
    if isinstance(leg, TransitLeg):
        return transit_contact_risk(leg, air, mode)
    if isinstance(leg, ActiveLeg):
        return active_contact_risk(leg, air, mode)
    if isinstance(leg, RideHailLeg):
        return ridehail_contact_risk(leg, air, mode)
    raise ConfigurationError(f"unsupported leg type {type(leg).__name__}")


def segment_surface_risk(
    seg: Segment, fomite: FomiteParams | None = None, mode: str = "first_order"
) -> float:
    """Surface-touch channel: zero for walk, bike and drive segments."""
    if not seg.mode.has_surface_channel:
        return 0.0
    params = fomite if fomite is not None else seg.exposure.fomite
    if params is None:
        raise ConfigurationError(f"{seg.mode.value} segment is missing fomite parameters")
    return fomite_infection_prob(params, mode)


def path_risk(
    segments: Sequence[Segment],
    mode: str = "first_order",
    warn_threshold: float = 0.1,
) -> RiskBreakdown:
    """Compose per-segment channel risks into a path-level probability.

    Exact mode multiplies survival probabilities across segments and
    channels; first_order sums all channel probabilities and clamps at 1,
    warning once the sum passes ``warn_threshold``.
    """
    pairs: list[tuple[float, float]] = []
    for i, seg in enumerate(segments):
        if (
            i > 0
            and seg.mode.is_transit
            and segments[i - 1].mode.is_transit
            and seg.route is not None
            and seg.route == segments[i - 1].route
        ):
            raise ConfigurationError(
                "consecutive transit segments on the same route; transfers must split segments"
            )
        pairs.append((segment_contact_risk(seg, mode), segment_surface_risk(seg, mode=mode)))

    contacts = [c for c, _ in pairs]
    surfaces = [s for _, s in pairs]
    if mode == "exact":
        contact_total = survival_complement(contacts)
        surface_total = survival_complement(surfaces)
        total = survival_complement(contacts + surfaces)
    else:
        contact_total = first_order_sum(contacts, where="path contact channel")
        surface_total = first_order_sum(surfaces, where="path surface channel")
        raw = math.fsum(contacts) + math.fsum(surfaces)
        if raw > warn_threshold:
            warnings.warn(
                f"first-order path risk {raw:.6g} exceeds threshold {warn_threshold:g}",
                ApproximationBreakdownWarning,
                stacklevel=2,
            )
        total = min(raw, 1.0)
    return RiskBreakdown(
        per_segment=tuple(pairs),
        total=total,
        contact_total=contact_total,
        surface_total=surface_total,
        mode=mode,
    )


def trip_risk(paths: Sequence[tuple[float, Union[RiskBreakdown, float]]]) -> float:
    """Choice-probability-weighted mean of path risks."""
    if not paths:
        return 0.0
    total_prob = math.fsum(p for p, _ in paths)
    if abs(total_prob - 1.0) > 1e-9:
        raise ValueError(f"path choice probabilities must sum to 1, got {total_prob!r}")
    return math.fsum(
        p * (risk.total if isinstance(risk, RiskBreakdown) else float(risk))
        for p, risk in paths
    )
