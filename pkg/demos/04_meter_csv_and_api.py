"""
Meter CSV ingestion and the evaluation API
===========================================

Round-trips a community through the meter CSV format, then exercises the
HTTP evaluation service in-process: upload the CSV, evaluate a price point,
and fetch the sweep the negotiation dashboard plots.

Run the real server with:  lecsim-serve   (or python -m lecsim.service)
"""

import io
import pathlib
import tempfile

from fastapi.testclient import TestClient

from lecsim import load_community, save_community
from lecsim.service import create_app

# --- meter CSV format -------------------------------------------------------
csv_text = (
    "timestamp,unit_id,consumption_kwh,generation_kwh\n"
    "2025-01-01T00:00:00Z,a,0.42,0.0\n"
    "2025-01-01T00:15:00Z,a,0.38,0.0\n"
    "2025-01-01T00:00:00Z,b,0.10,0.55\n"
    "2025-01-01T00:15:00Z,b,0.12,0.61\n"
)
community = load_community(io.StringIO(csv_text))
print(f"loaded {len(community)} units x {community.n_intervals} intervals")

with tempfile.TemporaryDirectory() as tmp:
    path = pathlib.Path(tmp) / "meters.csv"
    save_community(community, path)
    print("serialized form (round-trips bit-exactly):")
    print(path.read_text())

# --- evaluation API ----------------------------------------------------------
client = TestClient(create_app())

info = client.get("/scenarios/table1").json()
print(f"preloaded scenario: {info['name']}, units {info['unit_ids']}")
print(f"fair price band: {info['fair_band']}")

upload = client.post("/scenarios", json={"meters_csv": csv_text, "name": "two-unit demo"})
token = upload.json()["token"]
print(f"uploaded scenario token: {token}")

evaluated = client.get(f"/scenarios/{token}/evaluate", params={"local_price": 0.10}).json()
print("savings at 0.10 CHF/kWh:")
for uid, econ in evaluated["lec"]["per_household"].items():
    print(f"  unit {uid}: {econ['savings_chf']:.4f} CHF")

swept = client.get(f"/scenarios/{token}/sweep", params={"min": 0.06, "max": 0.12}).json()
print(f"sweep rows: {len(swept['per_price'])}, fairest price: {swept['fair_price']}")
