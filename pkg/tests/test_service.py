"""HTTP API contract: payload shapes, error codes, parity with the CLI."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from commute_risk.cli import main
from commute_risk.service import create_app


@pytest.fixture(scope="module")
def client(small_city_dir):
    return TestClient(create_app(small_city_dir))


class TestHealthAndZones:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert len(body["fingerprint"]) == 64

    def test_zones_lists_all(self, client, small_city):
        body = client.get("/zones").json()
        assert {z["id"] for z in body["zones"]} == {z.id for z in small_city.zones}
        assert all("infection_rate" in z for z in body["zones"])


class TestPlanEndpoint:
    def test_transit_plan_shape(self, client):
        resp = client.post(
            "/plan",
            json={"origin": "zone:z14", "destination": "zone:z01", "depart": "08:00",
                  "mode": "transit", "k": 2},
        )
        assert resp.status_code == 200
        paths = resp.json()["paths"]
        assert 1 <= len(paths) <= 2
        for path in paths:
            assert path["travel_time_h"] > 0
            assert any(s["mode"].startswith("transit") for s in path["segments"])

    def test_probabilities_sum_to_one(self, client):
        resp = client.post(
            "/plan",
            json={"origin": "zone:z14", "destination": "zone:z01", "depart": "08:00",
                  "mode": "transit", "k": 3},
        )
        total = sum(p["choice_prob"] for p in resp.json()["paths"])
        assert total == pytest.approx(1.0, abs=1e-9)


class TestRiskEndpoint:
    def test_risk_payload(self, client):
        resp = client.post(
            "/risk",
            json={"origin": "zone:z14", "destination": "zone:z01", "depart": "08:00",
                  "mode": "transit", "seed": 5, "samples": 300},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["mean_probability"] > 0
        assert body["std_error"] > 0
        for path in body["paths"]:
            for seg in path["segments"]:
                assert {"mode", "duration_h", "contact_mean", "contact_se",
                        "surface_mean", "surface_se"} <= set(seg)

    def test_matches_cli_trip(self, client, small_city_dir):
        resp = client.post(
            "/risk",
            json={"origin": "zone:z14", "destination": "zone:z01", "depart": "08:00",
                  "mode": "transit", "seed": 11, "samples": 250},
        )
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["trip", "--origin", "zone:z14", "--dest", "zone:z01", "--depart", "08:00",
             "--mode", "transit", "--seed", "11", "--bootstrap", "250",
             "--data-dir", str(small_city_dir)],
            catch_exceptions=False,
        )
        cli_doc = json.loads(result.output)
        body = resp.json()
        assert body["mean_probability"] == cli_doc["mean_probability"]
        assert body["std_error"] == cli_doc["std_error"]

    def test_drive_zero_with_zero_error(self, client):
        resp = client.post(
            "/risk",
            json={"origin": "zone:z12", "destination": "zone:z01", "depart": "08:00",
                  "mode": "drive"},
        )
        body = resp.json()
        assert body["mean_probability"] == 0.0
        assert body["std_error"] == 0.0


class TestErrorCodes:
    def test_no_path(self, client):
        resp = client.post(
            "/risk",
            json={"origin": "zone:z16", "destination": "zone:z01", "depart": "08:00",
                  "mode": "walk"},
        )
        assert resp.status_code == 404
        assert resp.json()["code"] == "NO_PATH"

    def test_bad_query_unknown_zone(self, client):
        resp = client.post(
            "/risk",
            json={"origin": "zone:void", "destination": "zone:z01", "depart": "08:00",
                  "mode": "walk"},
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "BAD_QUERY"

    def test_bad_query_validation_error(self, client):
        resp = client.post("/risk", json={"origin": "zone:z14"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "BAD_QUERY"

    def test_bad_sweep_kind(self, client):
        resp = client.get("/sweep", params={"kind": "spatial", "mode": "walk", "dest": "zone:z01"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "BAD_QUERY"


class TestSweepEndpoint:
    def test_cells_and_scaled_error(self, client):
        resp = client.get(
            "/sweep",
            params={"kind": "temporal", "mode": "transit", "dest": "zone:z01",
                    "step_h": 6.0, "samples": 100, "seed": 2},
        )
        assert resp.status_code == 200
        cells = resp.json()["cells"]
        assert len(cells) == 4
        for cell in cells:
            if cell["status"] == "ok":
                assert cell["scaled_error"] == pytest.approx(cell["std_error"] / 10.0)

    def test_cache_returns_same_object(self, client):
        params = {"kind": "temporal", "mode": "transit", "dest": "zone:z01",
                  "step_h": 6.0, "samples": 100, "seed": 2}
        a = client.get("/sweep", params=params).json()
        b = client.get("/sweep", params=params).json()
        assert a == b
