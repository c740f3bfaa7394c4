"""Bootstrap-based uncertainty quantification for trip infection risk.

The estimator draws M joint samples of every declared random input,
evaluates the risk expression on each sample, and reports the empirical
mean and the empirical variance with 1/M normalization. Variances are
composed upward assuming independence: per-stop terms sum within a
transit segment, segment channels sum within a path, and path variances
combine through squared choice probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .sampling import RandomInput, derive_stream

__all__ = [
    "BootstrapConfig",
    "SegmentUncertainty",
    "PathUncertainty",
    "UncertainRiskEstimate",
    "NonFiniteSampleError",
    "bootstrap_variance",
    "transit_segment_variance",
    "active_segment_variance",
    "ridehail_segment_variance",
    "surface_variance",
    "trip_variance",
]

DEFAULT_SAMPLES = 1000


class NonFiniteSampleError(ArithmeticError):
    """The evaluated expression returned a non-finite value; carries the offending sample."""

    def __init__(self, message: str, sample: dict[str, float]):
        super().__init__(f"{message}: {sample!r}")
        self.sample = sample


@dataclass(frozen=True)
class BootstrapConfig:
    """Sampling budget, seed and evaluation mode for one uncertainty run."""

    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    mode: str = "first_order"  # "exact" | "first_order"
    per_stop_physics: bool = False

    def __post_init__(self) -> None:
        if self.samples < 2:
            raise ValueError(f"bootstrap needs at least 2 samples, got {self.samples}")
        if self.mode not in ("exact", "first_order"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class SegmentUncertainty:
    """Per-channel mean and variance for one segment."""

    mean_contact: float = 0.0
    var_contact: float = 0.0
    mean_surface: float = 0.0
    var_surface: float = 0.0

    @property
    def mean_total(self) -> float:
        return self.mean_contact + self.mean_surface

    @property
    def var_total(self) -> float:
        return self.var_contact + self.var_surface


@dataclass(frozen=True)
class PathUncertainty:
    choice_prob: float
    segments: tuple[SegmentUncertainty, ...] = ()


@dataclass(frozen=True)
class UncertainRiskEstimate:
    """Trip-level mean probability with bootstrap variance decomposition."""

    mean: float
    variance: float
    paths: tuple[PathUncertainty, ...]
    samples: int

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance)


def _empirical_moments(values: np.ndarray) -> tuple[float, float]:
    """Mean and 1/M-normalized variance; exact for constant samples."""
    values = np.asarray(values, dtype=float)
    if values.size and values.min() == values.max():
        return float(values.flat[0]), 0.0
    return float(values.mean()), float(values.var())


def _draw_all(
    inputs: Mapping[str, object],
    sampling: str,
    rng: np.random.Generator,
    size: int,
) -> dict[str, np.ndarray]:
    """Materialise (size,) sample vectors per input under the declared contract.

    ``independent`` draws each input from the shared stream in declaration
    order. ``joint`` resamples aligned rows of equal-length empirical
    pools. ``sequential`` additionally accepts callables evaluated in
    declaration order with access to everything drawn so far.
    """
    drawn: dict[str, np.ndarray] = {}
    if sampling == "joint":
        pools = {}
        for name, spec in inputs.items():
            if not isinstance(spec, RandomInput) or spec.kind != "empirical":
                raise ValueError("joint sampling requires empirical inputs with aligned pools")
            pools[name] = np.asarray(spec.pool)
        lengths = {len(p) for p in pools.values()}
        if len(lengths) != 1:
            raise ValueError(f"joint sampling needs equal pool lengths, got {sorted(lengths)}")
        idx = rng.integers(0, lengths.pop(), size)
        return {name: pool[idx] for name, pool in pools.items()}
    if sampling not in ("independent", "sequential"):
        raise ValueError(f"unknown sampling contract {sampling!r}")
    for name, spec in inputs.items():
        if isinstance(spec, RandomInput):
            drawn[name] = spec.sample(rng, size)
        elif callable(spec):
            if sampling != "sequential":
                raise ValueError(f"conditional input {name!r} requires sequential sampling")
            drawn[name] = np.asarray(spec(rng, size, drawn), dtype=float)
        else:
            raise TypeError(f"input {name!r} must be a RandomInput or a callable")
    return drawn


def bootstrap_variance(
    f: Callable[[Mapping[str, np.ndarray]], np.ndarray],
    inputs: Mapping[str, object],
    sampling: str = "independent",
    config: BootstrapConfig = BootstrapConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Empirical (mean, variance) of ``f`` over M joint draws of ``inputs``.

    ``f`` receives a mapping of (M,)-vectors and must return an (M,)
    vector. Results are deterministic given the config seed (or the
    caller-supplied stream). A non-finite evaluation aborts with the
    offending sample attached.
    """
    if rng is None:
        rng = derive_stream(config.seed, "bootstrap")
    samples = _draw_all(inputs, sampling, rng, config.samples)
    values = np.asarray(f(samples), dtype=float)
    if values.shape != (config.samples,):
        raise ValueError(f"f must return shape ({config.samples},), got {values.shape}")
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteSampleError(
            "risk expression returned a non-finite value",
            {name: float(vec[i]) for name, vec in samples.items()},
        )
    return _empirical_moments(values)


def _per_contact_prob(
    b: np.ndarray, q: np.ndarray, duration: np.ndarray, ventilation: np.ndarray
) -> np.ndarray:
    return -np.expm1(-(b * q * duration) / ventilation)


def _indoor_ventilation(draws: Mapping[str, np.ndarray]) -> np.ndarray:
    return draws["q_indoor"]


def _outdoor_ventilation(draws: Mapping[str, np.ndarray]) -> np.ndarray:
    return draws["L"] * draws["H"] * draws["v_wind"]


def _draw_air(
    air: Mapping[str, RandomInput], rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw (b, q, Q) vectors; Q comes from q_indoor or the airshed box."""
    draws = {name: spec.sample(rng, size) for name, spec in air.items()}
    if "q_indoor" in draws:
        ventilation = _indoor_ventilation(draws)
    else:
        ventilation = _outdoor_ventilation(draws)
    return draws["b"], draws["q"], ventilation


def _contact_terms(
    count: np.ndarray, mu: np.ndarray, pc: np.ndarray, mode: str
) -> np.ndarray:
    """Contact risk of ``count`` identical encounters with infection odds mu*pc."""
    if mode == "exact":
        event = np.clip(mu * pc, 0.0, 1.0 - 1e-15)
        return -np.expm1(count * np.log1p(-event))
    return count * mu * pc


def transit_segment_variance(
    stops: Sequence[Mapping[str, RandomInput]],
    air: Mapping[str, RandomInput],
    config: BootstrapConfig = BootstrapConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """(mean, variance) of in-vehicle contact risk for a transit segment.

    Each stop declares ``load`` (zero-truncated normal, integral),
    ``mu`` (empirical infectiousness pool) and ``tt`` (zero-truncated
    normal hours). The segment variance is the sum of per-stop variances
    of ``load * mu * (1 - exp(-b*q*tt/Q))``; environment parameters are
    drawn once per replication for the whole segment unless
    ``config.per_stop_physics`` is set.
    """
    if rng is None:
        rng = derive_stream(config.seed, "transit-segment")
    M = config.samples
    if not stops:
        return 0.0, 0.0
    if not config.per_stop_physics:
        b, q, vent = _draw_air(air, rng, M)
    mean_total = 0.0
    var_total = 0.0
    for stop in stops:
        if config.per_stop_physics:
            b, q, vent = _draw_air(air, rng, M)
        load = stop["load"].sample(rng, M)
        mu = stop["mu"].sample(rng, M)
        tt = stop["tt"].sample(rng, M)
        pc = _per_contact_prob(b, q, tt, vent)
        mean, var = _empirical_moments(_contact_terms(load, mu, pc, config.mode))
        mean_total += mean
        var_total += var
    return mean_total, var_total


def active_segment_variance(
    encounters: RandomInput,
    mu: RandomInput,
    contact_time: RandomInput,
    air: Mapping[str, RandomInput],
    config: BootstrapConfig = BootstrapConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """(mean, variance) of encounter contact risk for a walk or bike segment."""
    if rng is None:
        rng = derive_stream(config.seed, "active-segment")
    M = config.samples
    b, q, vent = _draw_air(air, rng, M)
    n = encounters.sample(rng, M)
    mu_draws = mu.sample(rng, M)
    d = contact_time.sample(rng, M)
    pc = _per_contact_prob(b, q, d, vent)
    return _empirical_moments(_contact_terms(n, mu_draws, pc, config.mode))


def _truncate_to_interval(
    draws: np.ndarray,
    upper: np.ndarray,
    spec: RandomInput,
    rng: np.random.Generator,
    max_rounds: int = 200,
) -> np.ndarray:
    """Redraw values until they fall in [0, upper] elementwise (true truncation)."""
    out = np.array(draws, dtype=float)
    for _ in range(max_rounds):
        bad = (out > upper) | (out < 0.0)
        if not bad.any():
            return out
        out[bad] = spec.sample(rng, int(bad.sum()))
    return np.clip(out, 0.0, upper)


def ridehail_segment_variance(
    occupancy: RandomInput,
    duration: RandomInput,
    shared_duration: RandomInput,
    p_infectious: RandomInput,
    air: Mapping[str, RandomInput],
    config: BootstrapConfig = BootstrapConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """(mean, variance) of in-vehicle contact risk for a ride-hailing segment.

    Sampling is sequential: draw the occupant count from the multinomial,
    then that many occupants (driver first, sharing the whole ride;
    riders share a duration truncated to the ride length), then the
    environment parameters, and evaluate the per-replication risk.
    """
    if rng is None:
        rng = derive_stream(config.seed, "ridehail-segment")
    M = config.samples
    n = occupancy.sample(rng, M)
    T = duration.sample(rng, M)
    # occupant slots: 0 = driver (d = T), 1..2 = shared riders
    events = np.zeros((3, M))
    driver_present = n >= 1
    p_driver = p_infectious.sample(rng, M)
    events[0] = np.where(driver_present, p_driver, 0.0)
    durations = np.zeros((3, M))
    durations[0] = T
    for slot in (1, 2):
        present = n >= slot + 1
        d_rider = _truncate_to_interval(shared_duration.sample(rng, M), T, shared_duration, rng)
        p_rider = p_infectious.sample(rng, M)
        events[slot] = np.where(present, p_rider, 0.0)
        durations[slot] = d_rider
    b, q, vent = _draw_air(air, rng, M)
    pc = _per_contact_prob(b[None, :], q[None, :], durations, vent[None, :])
    per_occupant = events * pc
    if config.mode == "exact":
        values = -np.expm1(np.log1p(-np.clip(per_occupant, 0.0, 1.0 - 1e-15)).sum(axis=0))
    else:
        values = per_occupant.sum(axis=0)
    return _empirical_moments(values)


def surface_variance(
    gamma: RandomInput,
    duration: RandomInput,
    touch_prob: object,
    config: BootstrapConfig = BootstrapConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """(mean, variance) of surface-touch risk ``gamma * T * p_touch``.

    ``touch_prob`` is either a RandomInput over the per-touch probability
    or a callable ``(rng, size, drawn) -> probabilities`` for sequential
    sampling of the probability given a drawn bioburden.
    """
    if rng is None:
        rng = derive_stream(config.seed, "surface")

    def f(z: Mapping[str, np.ndarray]) -> np.ndarray:
        touches = z["gamma"] * z["duration"]
        p = z["p_touch"]
        if config.mode == "exact":
            return -np.expm1(touches * np.log1p(-np.clip(p, 0.0, 1.0 - 1e-15)))
        return touches * p

    inputs: dict[str, object] = {"gamma": gamma, "duration": duration, "p_touch": touch_prob}
    sampling = "sequential" if callable(touch_prob) else "independent"
    return bootstrap_variance(f, inputs, sampling=sampling, config=config, rng=rng)


def trip_variance(
    paths: Sequence[PathUncertainty],
    mode: str = "first_order",
    samples: int = DEFAULT_SAMPLES,
) -> UncertainRiskEstimate:
    """Compose per-segment estimates into a trip-level estimate.

    Mean follows the declared mode (sum of segment means, or the exact
    survival product, valid because segments are independent); variance
    is always the sum of segment variances weighted by squared path
    choice probabilities.
    """
    total_prob = math.fsum(p.choice_prob for p in paths)
    if paths and abs(total_prob - 1.0) > 1e-9:
        raise ValueError(f"path choice probabilities must sum to 1, got {total_prob!r}")
    mean = 0.0
    variance = 0.0
    for path in paths:
        if mode == "exact":
            log_surv = sum(
                math.log1p(-min(s.mean_contact, 1.0 - 1e-15))
                + math.log1p(-min(s.mean_surface, 1.0 - 1e-15))
                for s in path.segments
            )
            path_mean = -math.expm1(log_surv)
        else:
            path_mean = min(math.fsum(s.mean_total for s in path.segments), 1.0)
        mean += path.choice_prob * path_mean
        variance += path.choice_prob**2 * math.fsum(s.var_total for s in path.segments)
    return UncertainRiskEstimate(mean=mean, variance=variance, paths=tuple(paths), samples=samples)
