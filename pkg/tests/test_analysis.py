"""Regression on risk drivers and spatial/temporal sweeps."""

import math

import numpy as np
import pytest

from commute_risk.analysis import (
    MORNING_PEAK_H,
    regress_risk_drivers,
    spatial_sweep,
    temporal_sweep,
)
from commute_risk.dataio import ResultRecord, TripRow
from commute_risk.demo import PEAK_WINDOWS, demo_network, demo_zones
from commute_risk.network import TripQuery
from commute_risk.pipeline import DataBundle
from commute_risk.synth import synthesize_transit_profiles
from commute_risk.uncertainty import BootstrapConfig


def planted_rows(network, zones, a, b):
    """Trips whose risk is exactly a + b * distance_km * if_transit."""
    rows, records = [], []
    modes = ["transit", "walk", "drive", "bike", "transit", "transit"]
    persons = ["faculty", "staff", "student"]
    for i, zone in enumerate(z for z in zones if z.id != "z01"):
        for j, mode in enumerate(modes):
            trip_id = f"p{i}_{j}"
            depart = 7.0 * 3600 if (i + j) % 2 == 0 else 13.5 * 3600
            query = TripQuery(
                origin=(zone.x, zone.y), destination="n10_10", depart_s=depart, mode=mode
            )
            d_km = math.hypot(zone.x, zone.y) / 1000.0
            risk = a + b * d_km * (1.0 if mode == "transit" else 0.0)
            rows.append(TripRow(trip_id, query, persons[(i + j) % 3]))
            records.append(ResultRecord(trip_id=trip_id, status="ok", mode=mode, mean=risk))
    return rows, records


class TestRegression:
    def test_recovers_planted_coefficients_exactly(self):
        zones = demo_zones()
        network = demo_network(zones)
        a, b = 2e-4, 5e-5
        rows, records = planted_rows(network, zones, a, b)
        fit = regress_risk_drivers(rows, records, network)
        assert fit.coefficients["intercept"] == pytest.approx(a, abs=1e-9)
        assert fit.coefficients["distance_x_transit"] == pytest.approx(b, abs=1e-9)
        for term in ("if_transit", "if_faculty", "distance_km", "if_morning_peak"):
            assert fit.coefficients[term] == pytest.approx(0.0, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_constant_response_gives_zero_slopes_and_r2(self):
        zones = demo_zones()
        network = demo_network(zones)
        rows, records = planted_rows(network, zones, 3e-4, 0.0)
        records = [
            ResultRecord(trip_id=r.trip_id, status="ok", mode=r.mode, mean=3e-4)
            for r in records
        ]
        fit = regress_risk_drivers(rows, records, network)
        assert fit.r_squared == 0.0
        for term in fit.terms:
            if term != "intercept":
                assert fit.coefficients[term] == 0.0
        assert fit.coefficients["intercept"] == 3e-4

    def test_non_ok_rows_excluded(self):
        zones = demo_zones()
        network = demo_network(zones)
        rows, records = planted_rows(network, zones, 2e-4, 5e-5)
        # poison half the records; regression must ignore them
        poisoned = [
            ResultRecord(trip_id=r.trip_id, status="no_path", mode=r.mode, mean=99.0)
            if i % 2 else r
            for i, r in enumerate(records)
        ]
        fit = regress_risk_drivers(rows, poisoned, network)
        assert fit.coefficients["distance_x_transit"] == pytest.approx(5e-5, abs=1e-9)
        assert fit.n == sum(1 for i in range(len(records)) if i % 2 == 0)

    def test_morning_peak_window_definition(self):
        zones = demo_zones()
        network = demo_network(zones)
        rows, records = [], []
        # risk = 1e-4 + 1e-4 * peak flag with [6, 9) the peak window
        for i, depart_h in enumerate((5.99, 6.0, 7.5, 8.99, 9.0, 12.0, 6.5, 8.0, 10.0, 7.0, 8.5, 11.0)):
            zone = zones[2 + i % 8]
            peak = 1.0 if 6.0 <= depart_h < 9.0 else 0.0
            query = TripQuery(
                origin=(zone.x, zone.y), destination="n10_10",
                depart_s=depart_h * 3600.0, mode="walk" if i % 2 else "transit",
            )
            rows.append(TripRow(f"m{i}", query, "staff"))
            records.append(
                ResultRecord(trip_id=f"m{i}", status="ok", mode=query.mode, mean=1e-4 + 1e-4 * peak)
            )
        fit = regress_risk_drivers(rows, records, network)
        assert fit.coefficients["if_morning_peak"] == pytest.approx(1e-4, abs=1e-9)


class TestSweeps:
    def test_spatial_walk_marks_unreachable_zones(self, small_city):
        cells = spatial_sweep(
            small_city, "walk", "n10_10", config=BootstrapConfig(samples=50, seed=1)
        )
        status = {c.key: c.status for c in cells}
        assert "no_path" in status.values()
        # zones within reach evaluate fine
        assert any(s == "ok" for s in status.values())

    def test_temporal_sweep_grid_must_divide_day(self, small_city):
        with pytest.raises(ValueError):
            temporal_sweep(small_city, "transit", "n10_10", step_h=5.0)

    def test_temporal_peaks_inside_configured_windows(self, small_city):
        cells = temporal_sweep(
            small_city, "transit", "n10_10", step_h=1.0,
            config=BootstrapConfig(samples=150, seed=2),
        )
        ok = [c for c in cells if c.status == "ok"]
        top = max(ok, key=lambda c: c.mean)
        hour = float(top.key)
        assert any(lo <= hour < hi for lo, hi in PEAK_WINDOWS)
        assert top.scaled_error == pytest.approx(top.std_error / 10.0)

    def test_flat_loads_make_hours_equal_within_noise(self, small_city, tmp_path):
        # same network, uniform infection rates, flat diurnal factors
        from dataclasses import replace

        zones = [replace(z, infection_rate=0.01) for z in small_city.zones]
        flat_profiles = synthesize_transit_profiles(
            small_city.network, zones, demand_scale=20.0, seed=5,
            diurnal={p.name: 1.0 for p in small_city.network.periods},
        )
        bundle = DataBundle(
            network=small_city.network,
            zones=zones,
            params=small_city.params,
            density=small_city.density,
            transit_profiles=flat_profiles,
            ridehail_profile=small_city.ridehail_profile,
        )
        cells = temporal_sweep(
            bundle, "transit", "n10_10", step_h=4.0,
            config=BootstrapConfig(samples=600, seed=3),
        )
        ok = [c for c in cells if c.status == "ok"]
        means = np.array([c.mean for c in ok])
        errors = np.array([c.std_error for c in ok])
        spread = means.max() - means.min()
        assert spread <= 4.0 * errors.max()
