"""HTTP API over a loaded data bundle.

Stateless JSON service consumed by the browser explorer: plan paths,
estimate risk with standard errors, list zones, and serve cached
departure-time sweeps. Machine-readable error codes: BAD_QUERY (400),
NO_PATH (404), DATA_MISSING (503).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .analysis import temporal_sweep
from .dataio import SchemaError, parse_depart, parse_endpoint, record_to_doc
from .network import TripQuery
from .pipeline import DataBundle, DataMissingError, evaluate_trip
from .planner import NoPathError, choose, plan, with_commonality
from .uncertainty import BootstrapConfig

__all__ = ["create_app"]


class PlanRequest(BaseModel):
    origin: str = Field(description="node:<id> or zone:<id>")
    destination: str
    depart: str = "08:00"
    mode: str = "transit"
    k: int = 1


class RiskRequest(PlanRequest):
    seed: int = 0
    samples: int = Field(default=1000, ge=2, le=200_000)
    exact: bool = False


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "detail": detail})


def _path_doc(evaluation, include_risk: bool) -> list[dict]:
    docs = []
    for pe in evaluation.paths:
        attrs = pe.path.attributes
        doc = {
            "choice_prob": pe.choice_prob,
            "travel_time_h": pe.path.total_time_h,
            "attributes": {
                "walk_time_h": attrs.walk_time_h,
                "wait_time_h": attrs.wait_time_h,
                "in_vehicle_time_h": attrs.in_vehicle_time_h,
                "monetary_cost": attrs.monetary_cost,
                "commonality": attrs.commonality,
            },
            "segments": [
                {
                    "mode": s.mode,
                    "duration_h": s.duration_h,
                    **(
                        {
                            "contact_mean": s.contact[0],
                            "contact_se": s.contact[1] ** 0.5,
                            "surface_mean": s.surface[0],
                            "surface_se": s.surface[1] ** 0.5,
                        }
                        if include_risk
                        else {}
                    ),
                }
                for s in pe.segments
            ],
        }
        if include_risk:
            doc["mean_probability"] = pe.mean
            doc["std_error"] = pe.std_error
        docs.append(doc)
    return docs


def create_app(data_dir: str | Path) -> FastAPI:
    bundle = DataBundle.load(data_dir)
    app = FastAPI(title="commute-risk", docs_url=None, redoc_url=None)
    sweep_cache: dict[tuple, dict] = {}

    @app.exception_handler(RequestValidationError)
    async def bad_request(_req: Request, err: RequestValidationError):
        return _error(400, "BAD_QUERY", str(err.errors()[:3]))

    def _build_query(req: PlanRequest) -> TripQuery:
        try:
            return TripQuery(
                origin=parse_endpoint(req.origin, bundle.zones),
                destination=parse_endpoint(req.destination, bundle.zones),
                depart_s=parse_depart(req.depart),
                mode=req.mode,
            )
        except ValueError as err:
            raise _BadQuery(str(err)) from None

    class _BadQuery(Exception):
        def __init__(self, detail: str):
            self.detail = detail

    @app.exception_handler(_BadQuery)
    async def bad_query(_req: Request, err: _BadQuery):
        return _error(400, "BAD_QUERY", err.detail)

    @app.exception_handler(NoPathError)
    async def no_path(_req: Request, err: NoPathError):
        return _error(404, "NO_PATH", str(err))

    @app.exception_handler(DataMissingError)
    async def data_missing(_req: Request, err: DataMissingError):
        return _error(503, "DATA_MISSING", str(err))

    @app.get("/health")
    def health():
        return {"status": "ok", "fingerprint": bundle.fingerprint}

    @app.get("/zones")
    def zones():
        return {
            "zones": [
                {
                    "id": z.id,
                    "x": z.x,
                    "y": z.y,
                    "population": z.population,
                    "infection_rate": z.infection_rate,
                }
                for z in bundle.zones
            ]
        }

    @app.post("/plan")
    def plan_endpoint(req: PlanRequest):
        query = _build_query(req)
        paths = with_commonality(plan(query, bundle.network, k=req.k))
        probs = choose(paths)
        return {
            "query": req.model_dump(),
            "paths": [
                {
                    "choice_prob": float(prob),
                    "travel_time_h": p.total_time_h,
                    "attributes": {
                        "walk_time_h": p.attributes.walk_time_h,
                        "wait_time_h": p.attributes.wait_time_h,
                        "in_vehicle_time_h": p.attributes.in_vehicle_time_h,
                        "monetary_cost": p.attributes.monetary_cost,
                        "commonality": p.attributes.commonality,
                    },
                    "segments": [
                        {"mode": s.mode.value, "duration_h": s.duration, "route": s.route}
                        for s in p.segments
                    ],
                }
                for p, prob in zip(paths, probs)
            ],
        }

    @app.post("/risk")
    def risk_endpoint(req: RiskRequest):
        query = _build_query(req)
        config = BootstrapConfig(
            samples=req.samples, seed=req.seed, mode="exact" if req.exact else "first_order"
        )
        try:
            evaluation = evaluate_trip(query, bundle, k=req.k, config=config, trip_id="trip")
        except (NoPathError, DataMissingError):
            raise
        except Exception as err:  # evaluation failure: echo the trip back
            return JSONResponse(
                status_code=500,
                content={"code": "INTERNAL", "detail": str(err), "trip": req.model_dump()},
            )
        record = record_to_doc(evaluation.to_record("trip"))
        return {
            "query": req.model_dump(),
            "mean_probability": evaluation.estimate.mean,
            "std_error": evaluation.estimate.std_error,
            "record": record,
            "paths": _path_doc(evaluation, include_risk=True),
            "warnings": list(evaluation.warnings),
        }

    @app.get("/sweep")
    def sweep_endpoint(
        kind: str = Query("temporal"),
        mode: str = Query("transit"),
        dest: str = Query(...),
        step_h: float = Query(1.0, gt=0.0, le=24.0),
        seed: int = Query(0),
        samples: int = Query(400, ge=2, le=200_000),
    ):
        if kind != "temporal":
            raise _BadQuery(f"unsupported sweep kind {kind!r}")
        key = (kind, mode, dest, step_h, seed, samples, bundle.fingerprint)
        if key not in sweep_cache:
            try:
                destination = parse_endpoint(dest, bundle.zones)
            except ValueError as err:
                raise _BadQuery(str(err)) from None
            cells = temporal_sweep(
                bundle, mode, destination, step_h,
                BootstrapConfig(samples=samples, seed=seed),
            )
            sweep_cache[key] = {
                "cells": [
                    {
                        "key": c.key,
                        "status": c.status,
                        "mean": c.mean,
                        "std_error": c.std_error,
                        "scaled_error": c.scaled_error,
                    }
                    for c in cells
                ]
            }
        return sweep_cache[key]

    return app
