import pytest

from commute_risk.demo import demo_trip_profile, generate_demo
from commute_risk.pipeline import DataBundle
from commute_risk.synth import TripGenerationProfile


@pytest.fixture(scope="session")
def small_city_dir(tmp_path_factory):
    """A down-scaled demo bundle; fast to generate, same structure."""
    out = tmp_path_factory.mktemp("small_city")
    full = demo_trip_profile()
    profile = TripGenerationProfile(
        trips_per_capita=full.trips_per_capita,
        walk_share=full.walk_share,
        bike_share=full.bike_share,
        departure_weights=full.departure_weights,
        distance_m=full.distance_m,
        samples_per_zone=12,
    )
    generate_demo(out, seed=77, n_trips=60, density_replications=4, profile=profile)
    return out


@pytest.fixture(scope="session")
def small_city(small_city_dir):
    return DataBundle.load(small_city_dir)
