"""Evaluation API: sessions, uploads, evaluate/sweep endpoints, consistency
with the CLI path."""

import pytest
from fastapi.testclient import TestClient

from lecsim import Scenario, TariffSchedule, build_run_report
from lecsim.service import SessionStore, create_app

from conftest import make_community

UPLOAD_CSV = (
    "timestamp,unit_id,consumption_kwh,generation_kwh\n"
    "2025-01-01T00:00:00Z,pv,0.6,0.0\n"
    "2025-01-01T00:15:00Z,pv,0.1,1.2\n"
    "2025-01-01T00:30:00Z,pv,0.0,0.8\n"
    "2025-01-01T00:45:00Z,pv,0.9,0.0\n"
    "2025-01-01T00:00:00Z,flat,0.5,0.0\n"
    "2025-01-01T00:15:00Z,flat,0.4,0.0\n"
    "2025-01-01T00:30:00Z,flat,0.6,0.0\n"
    "2025-01-01T00:45:00Z,flat,0.5,0.0\n"
)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture()
def uploaded_token(client):
    response = client.post("/scenarios", json={"meters_csv": UPLOAD_CSV, "name": "mini"})
    assert response.status_code == 201
    return response.json()["token"]


class TestScenarioSessions:
    def test_bundled_scenario_preloaded(self, client):
        response = client.get("/scenarios/table1")
        assert response.status_code == 200
        body = response.json()
        assert body["name"] == "table1"
        assert body["unit_ids"] == ["1", "2", "3", "4", "5", "6", "7"]
        assert body["fair_band"]["low"] == 0.06

    def test_upload_returns_token(self, client):
        response = client.post("/scenarios", json={"meters_csv": UPLOAD_CSV, "name": "x"})
        assert response.status_code == 201
        body = response.json()
        assert body["unit_ids"] == ["pv", "flat"]
        assert body["token"]

    def test_seven_unit_upload(self, client):
        rows = ["timestamp,unit_id,consumption_kwh,generation_kwh"]
        for uid in range(1, 8):
            rows.append(f"2025-01-01T00:00:00Z,u{uid},0.5,{0.2 if uid <= 3 else 0.0}")
            rows.append(f"2025-01-01T00:15:00Z,u{uid},0.4,{0.9 if uid <= 3 else 0.0}")
        response = client.post("/scenarios", json={"meters_csv": "\n".join(rows) + "\n"})
        assert response.status_code == 201
        assert len(response.json()["unit_ids"]) == 7

    def test_same_content_same_token(self, client):
        a = client.post("/scenarios", json={"meters_csv": UPLOAD_CSV, "name": "x"})
        b = client.post("/scenarios", json={"meters_csv": UPLOAD_CSV, "name": "x"})
        assert a.json()["token"] == b.json()["token"]

    def test_invalid_row_named_in_400(self, client):
        bad = UPLOAD_CSV.replace("2025-01-01T00:15:00Z,pv,0.1,1.2", "2025-01-01T00:15:00Z,pv,-0.1,1.2")
        response = client.post("/scenarios", json={"meters_csv": bad})
        assert response.status_code == 400
        assert "pv" in response.json()["detail"]
        assert "00:15:00" in response.json()["detail"]

    def test_bad_tariff_key_is_400(self, client):
        response = client.post(
            "/scenarios", json={"meters_csv": UPLOAD_CSV, "tariffs": {"feedin": 0.06}}
        )
        assert response.status_code == 400

    def test_oversize_upload_is_413(self):
        app = create_app(max_upload_bytes=64)
        local = TestClient(app)
        response = local.post("/scenarios", json={"meters_csv": UPLOAD_CSV})
        assert response.status_code == 413

    def test_unknown_token_is_404(self, client):
        assert client.get("/scenarios/nope/evaluate").status_code == 404
        assert client.get("/scenarios/nope/sweep").status_code == 404

    def test_sessions_expire_after_idle(self):
        clock = {"now": 0.0}
        store = SessionStore(ttl_secs=10.0, clock=lambda: clock["now"])
        scenario = Scenario(
            name="s",
            community=make_community([("a", [1.0], [0.0])]),
            tariffs=TariffSchedule(),
        )
        token = store.put(scenario)
        clock["now"] = 5.0
        assert store.get(token) is scenario  # access refreshes idle timer
        clock["now"] = 14.0
        assert store.get(token) is scenario
        clock["now"] = 30.0
        with pytest.raises(KeyError):
            store.get(token)

    def test_pinned_sessions_never_expire(self):
        clock = {"now": 0.0}
        store = SessionStore(ttl_secs=1.0, clock=lambda: clock["now"])
        scenario = Scenario(
            name="s",
            community=make_community([("a", [1.0], [0.0])]),
            tariffs=TariffSchedule(),
        )
        store.put(scenario, token="fixture", pinned=True)
        clock["now"] = 1e6
        assert store.get("fixture") is scenario


class TestEvaluate:
    def test_benefit_at_default_price(self, client):
        response = client.get("/scenarios/table1/evaluate", params={"local_price": 0.10})
        assert response.status_code == 200
        body = response.json()
        for econ in body["lec"]["per_household"].values():
            assert econ["savings_chf"] >= -1e-9

    def test_gamma_one_buyer_pays_exactly_local_price(self, client, uploaded_token):
        response = client.get(
            f"/scenarios/{uploaded_token}/evaluate",
            params={"local_price": 0.09, "gamma": 1.0},
        )
        body = response.json()
        # the pure consumer buys 0.4 + 0.6 kWh locally and imports 0.5 + 0.5
        flat = body["lec"]["per_household"]["flat"]
        assert flat["cost_chf"] == pytest.approx(1.0 * 0.09 + 1.0 * 0.241, abs=1e-12)

    def test_local_price_at_feed_in_keeps_prosumer_neutral(self, client, uploaded_token):
        response = client.get(
            f"/scenarios/{uploaded_token}/evaluate", params={"local_price": 0.06}
        )
        body = response.json()
        pv = body["lec"]["per_household"]["pv"]
        assert pv["savings_chf"] == pytest.approx(0.0, abs=1e-12)

    def test_invalid_parameters_are_422(self, client):
        assert (
            client.get("/scenarios/table1/evaluate", params={"gamma": 1.5}).status_code
            == 422
        )
        assert (
            client.get(
                "/scenarios/table1/evaluate", params={"local_price": -0.01}
            ).status_code
            == 422
        )
        assert (
            client.get(
                "/scenarios/table1/evaluate", params={"local_price": "abc"}
            ).status_code
            == 422
        )

    def test_matches_engine_run_report(self, client, uploaded_token):
        from lecsim import load_community
        import io

        response = client.get(
            f"/scenarios/{uploaded_token}/evaluate", params={"local_price": 0.11}
        )
        scenario = Scenario(
            name="mini",
            community=load_community(io.StringIO(UPLOAD_CSV)),
            tariffs=TariffSchedule(),
            provenance=("uploaded via API",),
        )
        expected = build_run_report(
            scenario, TariffSchedule(local_price=0.11)
        ).to_dict()
        assert response.json() == expected


class TestSweepEndpoint:
    def test_default_sweep(self, client, uploaded_token):
        response = client.get(f"/scenarios/{uploaded_token}/sweep")
        assert response.status_code == 200
        body = response.json()
        assert len(body["price_grid"]) == 13
        assert body["summary"]["fair_price"] == body["fair_price"]

    def test_evaluate_consistent_with_sweep_row(self, client, uploaded_token):
        sweep_body = client.get(f"/scenarios/{uploaded_token}/sweep").json()
        price = sweep_body["price_grid"][4]
        row = sweep_body["per_price"][4]
        evaluated = client.get(
            f"/scenarios/{uploaded_token}/evaluate", params={"local_price": price}
        ).json()
        for uid, chf in row["savings_chf"].items():
            assert evaluated["lec"]["per_household"][uid]["savings_chf"] == chf
        assert evaluated["fairness"]["cv"] == row["cv"]

    def test_invalid_range_is_422(self, client):
        response = client.get(
            "/scenarios/table1/sweep", params={"min": 0.12, "max": 0.06}
        )
        assert response.status_code == 422

    def test_deterministic_responses(self, client, uploaded_token):
        a = client.get(f"/scenarios/{uploaded_token}/sweep")
        b = client.get(f"/scenarios/{uploaded_token}/sweep")
        assert a.content == b.content
