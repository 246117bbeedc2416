"""Stateless evaluation API backing the negotiation UI.

Scenarios are uploaded (or the bundled one selected) and held in an
in-memory session store keyed by a content-hash token; evaluation and sweep
endpoints are pure functions of (scenario, query parameters), so responses
are bitwise-deterministic and the same engine path serves the CLI and the
UI. No persistence: billing-grade output is the CLI's file export.

Environment: LEC_BIND_ADDR (host:port), LEC_SESSION_TTL_SECS idle expiry,
LEC_MAX_UPLOAD_BYTES upload cap, LEC_CORS_ORIGINS comma-separated origins.
"""

from __future__ import annotations

import io
import os
import threading
import time
from dataclasses import dataclass, replace

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import ConfigError, DataError, UsageError
from .metering import load_community
from .report import build_run_report, sweep_summary_dict
from .scenario import Scenario, scenario_hash, synth_table1
from .sweep import (
    DEFAULT_PRICE_MAX,
    DEFAULT_PRICE_MIN,
    DEFAULT_PRICE_STEP,
    sweep_local_price,
)
from .tariffs import energy_price, tariffs_from_config, tariffs_to_config

DEFAULT_SESSION_TTL_SECS = 3600.0
DEFAULT_MAX_UPLOAD_BYTES = 10 * 1024 * 1024
BUNDLED_TOKEN = "table1"


class ScenarioUpload(BaseModel):
    meters_csv: str
    tariffs: dict = {}
    name: str = "uploaded"


@dataclass
class SessionScenario:
    token: str
    scenario: Scenario
    created_at: float
    last_access: float
    pinned: bool = False  # bundled fixtures never expire


class SessionStore:
    """In-memory, idle-expiring scenario sessions. Sessions are immutable
    once created; the lock only guards the map itself."""

    def __init__(self, ttl_secs: float, clock=time.monotonic):
        self._ttl = ttl_secs
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionScenario] = {}

    def put(self, scenario: Scenario, token: str | None = None, pinned: bool = False) -> str:
        token = token or scenario_hash(scenario)[:16]
        now = self._clock()
        with self._lock:
            self._purge(now)
            if token not in self._sessions:
                self._sessions[token] = SessionScenario(
                    token=token,
                    scenario=scenario,
                    created_at=now,
                    last_access=now,
                    pinned=pinned,
                )
        return token

    def get(self, token: str) -> Scenario:
        now = self._clock()
        with self._lock:
            self._purge(now)
            session = self._sessions.get(token)
            if session is None:
                raise KeyError(token)
            session.last_access = now
            return session.scenario

    def _purge(self, now: float) -> None:
        expired = [
            t
            for t, s in self._sessions.items()
            if not s.pinned and now - s.last_access > self._ttl
        ]
        for t in expired:
            del self._sessions[t]


def create_app(
    session_ttl_secs: float | None = None,
    max_upload_bytes: int | None = None,
    cors_origins: list[str] | None = None,
    preload_bundled: bool = True,
) -> FastAPI:
    ttl = (
        session_ttl_secs
        if session_ttl_secs is not None
        else float(os.environ.get("LEC_SESSION_TTL_SECS", DEFAULT_SESSION_TTL_SECS))
    )
    max_upload = (
        max_upload_bytes
        if max_upload_bytes is not None
        else int(os.environ.get("LEC_MAX_UPLOAD_BYTES", DEFAULT_MAX_UPLOAD_BYTES))
    )
    if cors_origins is None:
        cors_origins = [
            o.strip()
            for o in os.environ.get("LEC_CORS_ORIGINS", "*").split(",")
            if o.strip()
        ]

    app = FastAPI(title="lecsim evaluation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(ttl_secs=ttl)
    app.state.store = store
    if preload_bundled:
        store.put(synth_table1(), token=BUNDLED_TOKEN, pinned=True)

    def _get_scenario(token: str) -> Scenario:
        try:
            return store.get(token)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown scenario token {token!r}")

    @app.post("/scenarios", status_code=201)
    def upload_scenario(body: ScenarioUpload):
        if len(body.meters_csv.encode("utf-8")) > max_upload:
            raise HTTPException(
                status_code=413,
                detail=f"meter CSV exceeds the upload limit of {max_upload} bytes",
            )
        try:
            community = load_community(io.StringIO(body.meters_csv))
            tariffs = tariffs_from_config(body.tariffs)
            scenario = Scenario(
                name=body.name,
                community=community,
                tariffs=tariffs,
                provenance=("uploaded via API",),
            )
        except (DataError, ConfigError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        token = store.put(scenario)
        return {"token": token, "name": scenario.name, "unit_ids": scenario.community.ids}

    @app.get("/scenarios/{token}")
    def scenario_info(token: str):
        scenario = _get_scenario(token)
        return {
            "token": token,
            "name": scenario.name,
            "description": scenario.description,
            "provenance": list(scenario.provenance),
            "unit_ids": scenario.community.ids,
            "n_intervals": scenario.community.n_intervals,
            "resolution_minutes": scenario.community.resolution_minutes,
            "tariffs": tariffs_to_config(scenario.tariffs),
            "fair_band": {
                "low": scenario.tariffs.feed_in,
                "high": energy_price(scenario.tariffs),
            },
        }

    @app.get("/scenarios/{token}/evaluate")
    def evaluate(
        token: str,
        local_price: float | None = None,
        gamma: float | None = None,
        levies_on_local: bool | None = None,
    ):
        scenario = _get_scenario(token)
        overrides = {}
        if local_price is not None:
            if local_price < 0:
                raise HTTPException(status_code=422, detail="local_price must be >= 0")
            overrides["local_price"] = local_price
        if gamma is not None:
            if not 0.0 <= gamma <= 1.0:
                raise HTTPException(status_code=422, detail="gamma must lie in [0, 1]")
            overrides["gamma"] = gamma
        if levies_on_local is not None:
            overrides["levies_on_local"] = levies_on_local
        try:
            tariffs = replace(scenario.tariffs, **overrides)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return build_run_report(scenario, tariffs).to_dict()

    @app.get("/scenarios/{token}/sweep")
    def sweep(
        token: str,
        min: float = DEFAULT_PRICE_MIN,
        max: float = DEFAULT_PRICE_MAX,
        step: float = DEFAULT_PRICE_STEP,
    ):
        scenario = _get_scenario(token)
        try:
            result = sweep_local_price(
                scenario.community, scenario.tariffs, p_min=min, p_max=max, step=step
            )
        except UsageError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        payload = result.to_dict()
        payload["summary"] = sweep_summary_dict(result)
        return payload

    return app


def main() -> None:
    import uvicorn

    bind = os.environ.get("LEC_BIND_ADDR", "127.0.0.1:8000")
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
