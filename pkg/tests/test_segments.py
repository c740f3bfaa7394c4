"""Per-mode segment risk and path/trip composition."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commute_risk.physics import AirborneParams, ConfigurationError, FomiteParams
from commute_risk.segments import (
    ActiveLeg,
    ExposureContext,
    Occupant,
    RideHailLeg,
    RiskBreakdown,
    Segment,
    TransitLeg,
    TravelMode,
    active_contact_risk,
    path_risk,
    ridehail_contact_risk,
    segment_surface_risk,
    transit_contact_risk,
    trip_risk,
)

INDOOR = AirborneParams(b=0.72, q=16.0, q_indoor=950.0)
OUTDOOR = AirborneParams(b=1.4, q=50.0, L=45.0, H=3.75, v_wind=5400.0)


def tt_for_per_contact(p, air=INDOOR):
    """Travel time such that the per-contact probability is exactly p."""
    return -air.q_indoor * math.log1p(-p) / (air.b * air.q)


class TestTransitContactRisk:
    def test_single_stop_first_order(self):
        leg = TransitLeg(stops=("a",), tt=(0.5,), load=(20.0,), mu=(0.005,))
        # 20 * 0.005 * (1 - exp(-0.72*16*0.5/950)), mpmath 50 dps
        assert transit_contact_risk(leg, INDOOR, "first_order") == pytest.approx(
            0.00060448140455178172, rel=1e-12
        )

    def test_all_mu_zero(self):
        leg = TransitLeg(stops=("a", "b"), tt=(0.2, 0.3), load=(10.0, 30.0), mu=(0.0, 0.0))
        assert transit_contact_risk(leg, INDOOR, "exact") == 0.0
        assert transit_contact_risk(leg, INDOOR, "first_order") == 0.0

    def test_two_stops_with_per_stop_risk_0_001(self):
        tt = tt_for_per_contact(0.001)
        leg = TransitLeg(stops=("a", "b"), tt=(tt, tt), load=(1.0, 1.0), mu=(1.0, 1.0))
        assert transit_contact_risk(leg, INDOOR, "exact") == pytest.approx(0.001999, rel=1e-9)
        assert transit_contact_risk(leg, INDOOR, "first_order") == pytest.approx(0.002, rel=1e-9)

    def test_empty_vehicle_is_zero_not_error(self):
        leg = TransitLeg(stops=("a", "b"), tt=(0.1, 0.1), load=(0.0, 0.0), mu=(0.01, 0.01))
        assert transit_contact_risk(leg, INDOOR, "exact") == 0.0

    def test_splitting_a_leg_preserves_exact_risk(self):
        leg = TransitLeg(
            stops=("a", "b", "c", "d"),
            tt=(0.1, 0.2, 0.15, 0.05),
            load=(12.0, 30.0, 7.0, 3.0),
            mu=(0.01, 0.02, 0.005, 0.001),
        )
        first = TransitLeg(stops=leg.stops[:2], tt=leg.tt[:2], load=leg.load[:2], mu=leg.mu[:2])
        second = TransitLeg(stops=leg.stops[2:], tt=leg.tt[2:], load=leg.load[2:], mu=leg.mu[2:])
        whole = transit_contact_risk(leg, INDOOR, "exact")
        a = transit_contact_risk(first, INDOOR, "exact")
        b = transit_contact_risk(second, INDOOR, "exact")
        assert whole == pytest.approx(1.0 - (1.0 - a) * (1.0 - b), rel=1e-12)

    @given(
        loads=st.lists(st.floats(0.0, 60.0), min_size=1, max_size=8),
        mu=st.floats(0.0, 0.05),
        tt=st.floats(0.01, 0.5),
    )
    @settings(max_examples=150)
    def test_monotone_in_load_mu_tt(self, loads, mu, tt):
        stops = tuple(f"s{i}" for i in range(len(loads)))
        base = TransitLeg(stops=stops, tt=(tt,) * len(loads), load=tuple(loads), mu=(mu,) * len(loads))
        bumped_load = TransitLeg(
            stops=stops, tt=(tt,) * len(loads), load=tuple(x + 1 for x in loads), mu=(mu,) * len(loads)
        )
        bumped_tt = TransitLeg(
            stops=stops, tt=(tt * 1.5,) * len(loads), load=tuple(loads), mu=(mu,) * len(loads)
        )
        for mode in ("exact", "first_order"):
            b0 = transit_contact_risk(base, INDOOR, mode)
            assert transit_contact_risk(bumped_load, INDOOR, mode) >= b0
            assert transit_contact_risk(bumped_tt, INDOOR, mode) >= b0


class TestActiveContactRisk:
    def test_encounter_composition(self):
        leg = ActiveLeg(encounters=30.0, mu=0.005, contact_duration=5.0 / 3600.0)
        # 30 * 0.005 * 1.0669104750162059e-7 (outdoor oracle)
        assert active_contact_risk(leg, OUTDOOR, "first_order") == pytest.approx(
            1.6003657125243089e-8, rel=1e-12
        )

    def test_no_encounters(self):
        leg = ActiveLeg(encounters=0.0, mu=0.01, contact_duration=0.001)
        assert active_contact_risk(leg, OUTDOOR, "exact") == 0.0
        assert active_contact_risk(leg, OUTDOOR, "first_order") == 0.0

    def test_zero_contact_time(self):
        leg = ActiveLeg(encounters=50.0, mu=0.01, contact_duration=0.0)
        assert active_contact_risk(leg, OUTDOOR, "exact") == 0.0
        assert active_contact_risk(leg, OUTDOOR, "first_order") == 0.0


class TestRidehailContactRisk:
    def test_empty_vehicle(self):
        leg = RideHailLeg(occupants=())
        assert ridehail_contact_risk(leg, INDOOR, "exact") == 0.0
        assert ridehail_contact_risk(leg, INDOOR, "first_order") == 0.0

    def test_driver_only(self):
        air = AirborneParams(b=0.72, q=16.0, q_indoor=105.0)
        leg = RideHailLeg(occupants=(Occupant("driver", 0.005, 0.4),))
        # 0.005 * (1 - exp(-0.72*16*0.4/105)), mpmath 50 dps
        assert ridehail_contact_risk(leg, air, "first_order") == pytest.approx(
            2.1468335055325829e-4, rel=1e-12
        )

    def test_identical_rider_doubles_first_order(self):
        air = AirborneParams(b=0.72, q=16.0, q_indoor=105.0)
        solo = RideHailLeg(occupants=(Occupant("driver", 0.005, 0.4),))
        shared = RideHailLeg(
            occupants=(Occupant("driver", 0.005, 0.4), Occupant("rider", 0.005, 0.4))
        )
        assert ridehail_contact_risk(shared, air, "first_order") == pytest.approx(
            2.0 * ridehail_contact_risk(solo, air, "first_order"), rel=1e-14
        )

    def test_occupancy_invariants(self):
        with pytest.raises(ConfigurationError):
            RideHailLeg(occupants=(Occupant("driver", 0.1, 1.0), Occupant("driver", 0.1, 1.0)))
        with pytest.raises(ConfigurationError):
            RideHailLeg(occupants=tuple(Occupant("rider", 0.1, 0.5) for _ in range(3)))


def walk_segment(encounters=30.0, mu=0.005):
    return Segment(
        mode=TravelMode.WALK,
        duration=0.4,
        exposure=ExposureContext(
            air=OUTDOOR, leg=ActiveLeg(encounters, mu, 5.0 / 3600.0)
        ),
    )


def transit_segment(per_stop=0.001, n_stops=1, route="r1"):
    tt = tt_for_per_contact(per_stop)
    leg = TransitLeg(
        stops=tuple(f"s{i}" for i in range(n_stops)),
        tt=(tt,) * n_stops,
        load=(1.0,) * n_stops,
        mu=(1.0,) * n_stops,
    )
    return Segment(
        mode=TravelMode.TRANSIT_BUS,
        duration=tt * n_stops,
        exposure=ExposureContext(
            air=INDOOR,
            leg=leg,
            fomite=FomiteParams(gamma=4.0, duration=0.5, p_touch=0.001, v_load=65.0),
        ),
        route=route,
    )


class TestSurfaceChannel:
    def test_walk_and_bike_are_exactly_zero(self):
        fomite = FomiteParams(gamma=4.0, duration=0.5, p_touch=0.9)
        assert segment_surface_risk(walk_segment(), fomite) == 0.0
        bike = Segment(mode=TravelMode.BIKE, duration=0.2)
        assert segment_surface_risk(bike, fomite) == 0.0

    def test_drive_is_exactly_zero(self):
        drive = Segment(mode=TravelMode.DRIVE, duration=1.0)
        assert segment_surface_risk(drive, FomiteParams(4.0, 0.5, 0.9)) == 0.0

    def test_transit_uses_fomite_params(self):
        seg = transit_segment()
        assert segment_surface_risk(seg, mode="first_order") == pytest.approx(0.002, rel=1e-12)


class TestPathRisk:
    def test_two_segment_composition(self):
        segs = [transit_segment(0.001, route="r1"), transit_segment(0.002, route="r2")]
        # zero the surface channel so only the contact channel contributes
        mute = FomiteParams(gamma=0.0, duration=0.0, p_touch=0.0)
        segs = [
            Segment(s.mode, s.duration, s.geometry, ExposureContext(s.exposure.air, mute, s.exposure.leg), s.route)
            for s in segs
        ]
        exact = path_risk(segs, "exact")
        first = path_risk(segs, "first_order")
        assert exact.total == pytest.approx(0.002998, rel=1e-9)
        assert first.total == pytest.approx(0.003, rel=1e-9)

    def test_all_driving_path_is_zero(self):
        segs = [Segment(mode=TravelMode.DRIVE, duration=0.5) for _ in range(3)]
        breakdown = path_risk(segs, "exact")
        assert breakdown.total == 0.0
        assert breakdown.per_segment == ((0.0, 0.0), (0.0, 0.0), (0.0, 0.0))

    def test_single_segment_path_equals_segment_risk(self):
        seg = walk_segment()
        for mode in ("exact", "first_order"):
            breakdown = path_risk([seg], mode)
            assert breakdown.total == pytest.approx(breakdown.per_segment[0][0], rel=1e-14)

    def test_channel_totals_reconstruct_path_total(self):
        segs = [transit_segment(0.001, route="r1"), transit_segment(0.002, route="r2"), walk_segment()]
        first = path_risk(segs, "first_order")
        assert first.total == pytest.approx(first.contact_total + first.surface_total, rel=1e-12)
        exact = path_risk(segs, "exact")
        recomposed = 1.0 - (1.0 - exact.contact_total) * (1.0 - exact.surface_total)
        assert exact.total == pytest.approx(recomposed, rel=1e-12)

    def test_same_route_consecutive_transit_rejected(self):
        segs = [transit_segment(route="r1"), transit_segment(route="r1")]
        with pytest.raises(ConfigurationError):
            path_risk(segs)

    @given(
        probs=st.lists(st.floats(1e-8, 1e-3), min_size=1, max_size=6),
    )
    @settings(max_examples=100)
    def test_modes_agree_for_small_probabilities(self, probs):
        segs = [
            Segment(
                TravelMode.TRANSIT_BUS,
                duration=tt_for_per_contact(p),
                exposure=ExposureContext(
                    air=INDOOR,
                    leg=TransitLeg(("s",), (tt_for_per_contact(p),), (1.0,), (1.0,)),
                    fomite=FomiteParams(gamma=0.0, duration=0.0, p_touch=0.0),
                ),
                route=f"r{i}",
            )
            for i, p in enumerate(probs)
        ]
        exact = path_risk(segs, "exact").total
        first = path_risk(segs, "first_order").total
        assert exact <= first
        assert first - exact <= 0.01 * exact + 1e-300


class TestTripRisk:
    def test_single_path(self):
        assert trip_risk([(1.0, 0.004)]) == pytest.approx(0.004, rel=1e-15)

    def test_weighted_mean(self):
        assert trip_risk([(0.5, 0.002), (0.5, 0.004)]) == pytest.approx(0.003, rel=1e-15)

    def test_all_zero_paths(self):
        assert trip_risk([(0.3, 0.0), (0.7, 0.0)]) == 0.0

    def test_bad_probability_sum_rejected(self):
        with pytest.raises(ValueError):
            trip_risk([(0.5, 0.001), (0.6, 0.002)])

    @given(
        weights=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5),
        risks=st.lists(st.floats(0.0, 0.05), min_size=5, max_size=5),
    )
    @settings(max_examples=100)
    def test_bounded_by_extremes(self, weights, risks):
        w = [x / sum(weights) for x in weights]
        pairs = list(zip(w, risks[: len(w)]))
        value = trip_risk(pairs)
        rs = [r for _, r in pairs]
        assert min(rs) - 1e-12 <= value <= max(rs) + 1e-12
