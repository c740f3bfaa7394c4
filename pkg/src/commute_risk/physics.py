"""Closed-form infection physics for close contact and surface touching.

Per-contact probabilities follow the exponential dose model
``1 - exp(-b*q*d/Q)`` with breathing rate ``b`` (m^3/h), emission rate
``q`` (/h), exposure duration ``d`` (h) and clean-air ventilation ``Q``
(m^3/h). Indoors ``Q`` is the room ventilation rate; outdoors it is the
swept volume ``L*H*v_wind`` of a hypothetical airshed box.

All survival products are evaluated through ``log1p``/``expm1`` so that
results stay accurate in the small-probability regime that dominates
commuting exposure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

__all__ = [
    "AirborneParams",
    "Contact",
    "FomiteParams",
    "ApproximationBreakdownWarning",
    "ConfigurationError",
    "NumericError",
    "contact_infection_prob",
    "multi_contact_prob",
    "fomite_infection_prob",
]

Setting = Literal["indoor", "outdoor"]
Mode = Literal["exact", "first_order"]


class ConfigurationError(ValueError):
    """A physical parameter required by the requested model is absent or invalid."""


class NumericError(ArithmeticError):
    """An intermediate quantity became non-finite."""


class ApproximationBreakdownWarning(UserWarning):
    """A first-order probability sum left the regime where the expansion is trustworthy."""


def _require_positive(name: str, value: float | None) -> float:
    if value is None:
        raise ConfigurationError(f"{name} is required but not set")
    if not math.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be finite and > 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class AirborneParams:
    """Aerosol exposure parameters for one travel environment.

    Indoor environments need ``q_indoor``; outdoor environments need the
    airshed box (``L``, ``H``, ``v_wind``). The outdoor ventilation rate is
    always derived as ``L * H * v_wind``, never stored.

    Units: b in m^3/h, q per hour, q_indoor in m^3/h, L and H in metres,
    v_wind in metres per hour.
    """

    b: float
    q: float
    q_indoor: float | None = None
    L: float | None = None
    H: float | None = None
    v_wind: float | None = None

    def __post_init__(self) -> None:
        _require_positive("b", self.b)
        _require_positive("q", self.q)
        for name in ("q_indoor", "L", "H", "v_wind"):
            value = getattr(self, name)
            if value is not None:
                _require_positive(name, value)

    def ventilation(self, setting: Setting) -> float:
        """Clean-air ventilation rate (m^3/h) for the given setting."""
        if setting == "indoor":
            return _require_positive("q_indoor", self.q_indoor)
        if setting == "outdoor":
            L = _require_positive("L", self.L)
            H = _require_positive("H", self.H)
            v = _require_positive("v_wind", self.v_wind)
            return L * H * v
        raise ConfigurationError(f"unknown setting {setting!r}")


@dataclass(frozen=True)
class Contact:
    """One person sharing the traveller's breathing space.

    duration is in hours; p_infectious is the probability that this
    counterpart is infectious.
    """

    duration: float
    p_infectious: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.duration) or self.duration < 0:
            raise ConfigurationError(f"contact duration must be >= 0, got {self.duration!r}")
        if not (0.0 <= self.p_infectious <= 1.0):
            raise ConfigurationError(
                f"p_infectious must be in [0, 1], got {self.p_infectious!r}"
            )


@dataclass(frozen=True)
class FomiteParams:
    """Surface-touching exposure over one segment.

    gamma: touches per hour; duration: hours; p_touch: probability of
    infection per touch at the prevailing bioburden; v_load: the bioburden
    itself (gene copies/cm^2), carried for provenance and sampling.
    The implied touch count ``gamma * duration`` may be fractional.
    """

    gamma: float
    duration: float
    p_touch: float
    v_load: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma!r}")
        if not math.isfinite(self.duration) or self.duration < 0:
            raise ConfigurationError(f"duration must be >= 0, got {self.duration!r}")
        if not (0.0 <= self.p_touch <= 1.0):
            raise ConfigurationError(f"p_touch must be in [0, 1], got {self.p_touch!r}")
        if not math.isfinite(self.v_load) or self.v_load < 0:
            raise ConfigurationError(f"v_load must be >= 0, got {self.v_load!r}")

    @property
    def touches(self) -> float:
        return self.gamma * self.duration


def contact_infection_prob(
    params: AirborneParams, duration: float, setting: Setting
) -> float:
    """Probability of infection from one infectious contact of the given duration.

    Evaluates ``1 - exp(-b*q*duration/Q)`` with the setting-appropriate
    ventilation ``Q``; returns a value in [0, 1).
    """
    if not math.isfinite(duration) or duration < 0:
        raise ConfigurationError(f"duration must be >= 0, got {duration!r}")
    Q = params.ventilation(setting)
    exponent = params.b * params.q * duration / Q
    if not math.isfinite(exponent):
        raise NumericError(f"non-finite exposure exponent {exponent!r}")
    return -math.expm1(-exponent)


def survival_complement(event_probs: Iterable[float]) -> float:
    """``1 - prod(1 - p_i)`` computed through log-space for small probabilities."""
    log_survival = 0.0
    n_nonzero = 0
    last_nonzero = 0.0
    for p in event_probs:
        if p >= 1.0:
            return 1.0
        if p > 0.0:
            n_nonzero += 1
            last_nonzero = p
            log_survival += math.log1p(-p)
    if n_nonzero == 0:
        return 0.0
    if n_nonzero == 1:
        # single event: 1 - (1 - p) is p, bypass the transcendental round trip
        return last_nonzero
    return -math.expm1(log_survival)


def first_order_sum(event_probs: Iterable[float], where: str = "") -> float:
    """Sum of event probabilities, clamped to 1 with a breakdown warning."""
    total = math.fsum(event_probs)
    if total > 1.0:
        warnings.warn(
            f"first-order probability sum {total:.6g} exceeds 1"
            + (f" in {where}" if where else "")
            + "; clamped",
            ApproximationBreakdownWarning,
            stacklevel=3,
        )
        return 1.0
    return total


def multi_contact_prob(
    contacts: Sequence[Contact], per_contact_prob: float, mode: Mode = "first_order"
) -> float:
    """Probability of infection by at least one of the given contacts.

    ``per_contact_prob`` is the infection probability given that a
    counterpart is infectious (shared across the list, matching the
    single-environment-per-segment assumption). Exact mode composes
    survival probabilities; first_order sums ``p_infectious * P_c`` and
    clamps at 1.
    """
    if not (0.0 <= per_contact_prob <= 1.0):
        raise ConfigurationError(
            f"per_contact_prob must be in [0, 1], got {per_contact_prob!r}"
        )
    events = [c.p_infectious * per_contact_prob for c in contacts]
    if mode == "exact":
        return survival_complement(events)
    if mode == "first_order":
        return first_order_sum(events, where="multi_contact_prob")
    raise ConfigurationError(f"unknown mode {mode!r}")


def fomite_infection_prob(params: FomiteParams, mode: Mode = "first_order") -> float:
    """Probability of infection through surface touches over a segment.

    Exact mode evaluates ``1 - (1 - p_touch)**(gamma*duration)`` with a
    real-valued exponent; first_order returns ``gamma*duration*p_touch``
    clamped at 1.
    """
    n_touches = params.touches
    if mode == "exact":
        if n_touches == 0.0 or params.p_touch == 0.0:
            return 0.0
        if params.p_touch >= 1.0:
            return 1.0
        if n_touches == 1.0:
            return params.p_touch
        return -math.expm1(n_touches * math.log1p(-params.p_touch))
    if mode == "first_order":
        return first_order_sum([n_touches * params.p_touch], where="fomite_infection_prob")
    raise ConfigurationError(f"unknown mode {mode!r}")
