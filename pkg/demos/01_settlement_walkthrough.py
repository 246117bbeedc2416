"""
Settlement walkthrough on a toy community
==========================================

Builds a three-household community by hand (one large PV roof, one small
one, one pure consumer), settles a single afternoon both without and with
community exchange, and prints the full flow decomposition so you can
follow every kWh.
"""

from datetime import datetime, timezone

import numpy as np

from lecsim import (
    Community,
    HouseholdMeter,
    IntervalSeries,
    TariffSchedule,
    cost_lec,
    cost_reference,
    settle_lec,
    settle_reference,
)

start = datetime(2025, 6, 21, 12, 0, tzinfo=timezone.utc)

# Four 15-minute intervals around noon. Unit "roof" over-produces, unit
# "small" roughly covers itself, unit "flat" only consumes.
community = Community(
    households=(
        HouseholdMeter(
            "roof",
            consumption=IntervalSeries(start, [0.4, 0.5, 0.4, 0.6]),
            generation=IntervalSeries(start, [2.0, 2.4, 2.2, 1.8]),
        ),
        HouseholdMeter(
            "small",
            consumption=IntervalSeries(start, [0.6, 0.5, 0.6, 0.5]),
            generation=IntervalSeries(start, [0.7, 0.5, 0.4, 0.3]),
        ),
        HouseholdMeter(
            "flat",
            consumption=IntervalSeries(start, [0.9, 1.1, 1.0, 0.8]),
            generation=IntervalSeries(start, [0.0, 0.0, 0.0, 0.0]),
        ),
    )
)

tariffs = TariffSchedule()  # flat 2026 Zurich-region defaults

print("=== reference case: every household settles alone ===")
ref = settle_reference(community)
for i, uid in enumerate(ref.unit_ids):
    print(
        f"{uid:>5}: self={ref.self_kwh[i]}  import={ref.import_kwh[i]}  "
        f"export={ref.export_kwh[i]}"
    )
print("costs:", {u: round(c, 4) for u, c in cost_reference(ref, tariffs).items()})

print()
print("=== community case: surplus is exchanged before the grid ===")
lec = settle_lec(community)
print("exchanged per interval:", lec.local_exchange_kwh)
for i, uid in enumerate(lec.unit_ids):
    print(
        f"{uid:>5}: buy={np.round(lec.local_buy_kwh[i], 4)}  "
        f"sell={np.round(lec.local_sell_kwh[i], 4)}  "
        f"import={np.round(lec.import_kwh[i], 4)}  "
        f"export={np.round(lec.export_kwh[i], 4)}"
    )
print("costs:", {u: round(c, 4) for u, c in cost_lec(lec, tariffs).items()})

print()
print("Every bought kWh replaces a retail import; every sold kWh beats the")
print("feed-in remuneration. Both sides of the trade come out ahead.")
