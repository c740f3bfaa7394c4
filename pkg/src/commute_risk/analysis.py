"""Batch analysis: risk-driver regression and spatial/temporal sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .dataio import ResultRecord, TripRow
from .network import MultimodalNetwork, TripQuery
from .pipeline import BootstrapConfig, DataBundle, evaluate_trip
from .planner import NoPathError, PlannerConfig
from .synth import Zone

__all__ = [
    "RegressionResult",
    "SweepCell",
    "regress_risk_drivers",
    "spatial_sweep",
    "temporal_sweep",
    "MORNING_PEAK_H",
]

MORNING_PEAK_H = (6.0, 9.0)  # departure in [6:00, 9:00) counts as morning peak

REGRESSION_TERMS = (
    "intercept",
    "if_transit",
    "if_faculty",
    "distance_km",
    "if_morning_peak",
    "distance_x_transit",
)


@dataclass(frozen=True)
class RegressionResult:
    terms: tuple[str, ...]
    coefficients: dict[str, float]
    p_values: dict[str, float]
    r_squared: float
    n: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.r_squared <= 1.0 or math.isnan(self.r_squared)):
            raise ValueError(f"R^2 must be in [0, 1], got {self.r_squared}")


def _design_row(
    query: TripQuery, person_type: str, endpoints_km: float
) -> tuple[float, ...]:
    is_transit = 1.0 if query.mode == "transit" else 0.0
    is_faculty = 1.0 if person_type.strip().lower() == "faculty" else 0.0
    peak = 1.0 if MORNING_PEAK_H[0] <= query.depart_h < MORNING_PEAK_H[1] else 0.0
    return (
        1.0,
        is_transit,
        is_faculty,
        endpoints_km,
        peak,
        endpoints_km * is_transit,
    )


def _endpoint_xy(endpoint, network: MultimodalNetwork) -> tuple[float, float]:
    if isinstance(endpoint, str):
        node = network.nodes[endpoint]
        return node.x, node.y
    return endpoint


def regress_risk_drivers(
    rows: Sequence[TripRow],
    results: Sequence[ResultRecord] | Sequence[dict],
    network: MultimodalNetwork,
) -> RegressionResult:
    """OLS of inferred probability on mode, person, distance and peak flags.

    Straight-line origin-destination distance in km; the distance-by-transit
    interaction separates the distance effect for transit riders.
    """
    by_id = {}
    for r in results:
        if isinstance(r, ResultRecord):
            by_id[r.trip_id] = (r.status, r.mean)
        else:
            by_id[r["trip_id"]] = (r["status"], float(r["mean_probability"]))
    X_rows, y = [], []
    for row in rows:
        if row.query is None or row.trip_id not in by_id:
            continue
        status, mean = by_id[row.trip_id]
        if status != "ok":
            continue
        ox, oy = _endpoint_xy(row.query.origin, network)
        dx, dy = _endpoint_xy(row.query.destination, network)
        distance_km = math.hypot(ox - dx, oy - dy) / 1000.0
        X_rows.append(_design_row(row.query, row.person_type, distance_km))
        y.append(mean)
    if len(X_rows) <= len(REGRESSION_TERMS):
        raise ValueError(f"need more than {len(REGRESSION_TERMS)} usable rows, got {len(X_rows)}")
    X = np.asarray(X_rows)
    y_arr = np.asarray(y)
    n, p = X.shape
    sst = float(((y_arr - y_arr.mean()) ** 2).sum())
    if np.ptp(y_arr) == 0.0:
        # constant response: no slope explains anything
        coefs = {t: 0.0 for t in REGRESSION_TERMS}
        coefs["intercept"] = float(y_arr[0])
        return RegressionResult(
            terms=REGRESSION_TERMS,
            coefficients=coefs,
            p_values={t: 1.0 for t in REGRESSION_TERMS},
            r_squared=0.0,
            n=n,
        )
    beta, _, rank, _ = np.linalg.lstsq(X, y_arr, rcond=None)
    residuals = y_arr - X @ beta
    ssr = float((residuals**2).sum())
    dof = n - rank
    sigma2 = ssr / dof if dof > 0 else float("nan")
    cov = sigma2 * np.linalg.pinv(X.T @ X)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    p_values = {}
    for term, b, s in zip(REGRESSION_TERMS, beta, se):
        if s == 0.0 or not math.isfinite(s):
            p_values[term] = 1.0 if b == 0.0 else 0.0
        else:
            t_stat = b / s
            p_values[term] = float(2.0 * stats.t.sf(abs(t_stat), dof))
    return RegressionResult(
        terms=REGRESSION_TERMS,
        coefficients={t: float(b) for t, b in zip(REGRESSION_TERMS, beta)},
        p_values=p_values,
        r_squared=min(1.0, max(0.0, 1.0 - ssr / sst)),
        n=n,
    )


@dataclass(frozen=True)
class SweepCell:
    """One sweep output row: a zone (spatial) or an hour (temporal)."""

    key: str
    status: str
    mean: float = 0.0
    std_error: float = 0.0

    @property
    def scaled_error(self) -> float:
        """One tenth of the standard error, the plotting convention for shading."""
        return self.std_error / 10.0


def spatial_sweep(
    bundle: DataBundle,
    mode: str,
    destination,
    depart_s: float = 8 * 3600.0,
    config: BootstrapConfig = BootstrapConfig(),
    planner_config: PlannerConfig = PlannerConfig(),
) -> list[SweepCell]:
    """One synthetic traveller per zone toward a fixed destination."""
    cells = []
    for zone in bundle.zones:
        try:
            query = TripQuery(
                origin=(zone.x, zone.y), destination=destination, depart_s=depart_s, mode=mode
            )
            est = evaluate_trip(
                query, bundle, config=config, planner_config=planner_config,
                trip_id=f"sweep-{zone.id}",
            ).estimate
            cells.append(SweepCell(zone.id, "ok", est.mean, est.std_error))
        except (NoPathError, ValueError):
            cells.append(SweepCell(zone.id, "no_path"))
    return cells


def temporal_sweep(
    bundle: DataBundle,
    mode: str,
    destination,
    step_h: float = 1.0,
    config: BootstrapConfig = BootstrapConfig(),
    planner_config: PlannerConfig = PlannerConfig(),
) -> list[SweepCell]:
    """Departure-time sweep over the day, origins uniform across zones.

    Each cell reports the across-zone average risk and the standard error
    of that average (segment variances summed, then scaled by 1/n).
    """
    if step_h <= 0 or (24.0 / step_h) != round(24.0 / step_h):
        raise ValueError(f"step must divide 24 hours, got {step_h}")
    cells = []
    n_steps = int(round(24.0 / step_h))
    for i in range(n_steps):
        hour = i * step_h
        means, variances = [], []
        for zone in bundle.zones:
            try:
                query = TripQuery(
                    origin=(zone.x, zone.y),
                    destination=destination,
                    depart_s=hour * 3600.0,
                    mode=mode,
                )
                est = evaluate_trip(
                    query, bundle, config=config, planner_config=planner_config,
                    trip_id=f"sweep-{zone.id}-{i}",
                ).estimate
                means.append(est.mean)
                variances.append(est.variance)
            except (NoPathError, ValueError):
                continue
        key = f"{hour:05.2f}"
        if not means:
            cells.append(SweepCell(key, "no_path"))
        else:
            n = len(means)
            cells.append(
                SweepCell(
                    key,
                    "ok",
                    float(np.mean(means)),
                    math.sqrt(sum(variances)) / n,
                )
            )
    return cells
