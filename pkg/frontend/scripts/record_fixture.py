"""Record evaluation-service responses for the dashboard contract tests.

Captures, for the bundled scenario, the scenario info, the default sweep,
an evaluate response per slider grid point, two off-band prices (for the
verdict badge), and a small uploaded prosumer/consumer scenario evaluated
at the feed-in price. Everything is stored exactly as the service
serializes it. Rerun after engine changes:

    python3 scripts/record_fixture.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from lecsim.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "eval_fixture.json"

MINI_CSV = (
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


def main() -> None:
    client = TestClient(create_app())
    info = client.get("/scenarios/table1").json()
    sweep = client.get("/scenarios/table1/sweep").json()

    evaluations = {}
    for price in sweep["price_grid"] + [0.05, 0.13]:
        response = client.get(
            "/scenarios/table1/evaluate", params={"local_price": price}
        )
        evaluations[json.dumps(price)] = response.json()

    upload = client.post("/scenarios", json={"meters_csv": MINI_CSV, "name": "mini"})
    token = upload.json()["token"]
    mini = {
        "upload": upload.json(),
        "info": client.get(f"/scenarios/{token}").json(),
        "sweep": client.get(f"/scenarios/{token}/sweep").json(),
        "evaluate_at_feed_in": client.get(
            f"/scenarios/{token}/evaluate", params={"local_price": 0.06}
        ).json(),
        "meters_csv": MINI_CSV,
    }

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps(
            {"info": info, "sweep": sweep, "evaluations": evaluations, "mini": mini},
            indent=1,
            sort_keys=True,
        )
    )
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes, {len(evaluations)} evaluations)")


if __name__ == "__main__":
    main()
