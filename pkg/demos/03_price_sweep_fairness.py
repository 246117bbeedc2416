"""
Internal price negotiation support: sweep and fairness score
=============================================================

Scans the internal exchange price from the feed-in remuneration up to the
retail energy price on the bundled scenario. PV owners gain with a higher
price, consumers with a lower one; the coefficient of variation of saving
percentages scores how evenly the benefit spreads, and its minimum is the
suggested negotiation anchor.

Writes sweep.csv next to this script and, when matplotlib is available,
a savings-vs-price chart with the CV overlay.
"""

from pathlib import Path

from lecsim import sweep_local_price, synth_table1, write_sweep_csv

out_dir = Path(__file__).resolve().parent / "output"
out_dir.mkdir(exist_ok=True)

scenario = synth_table1(seed=42)
result = sweep_local_price(scenario.community, scenario.tariffs, 0.06, 0.12, 0.005)

print(f"{'price':>7} {'CV':>8}  per-household savings CHF")
for point in result.per_price:
    sv = "  ".join(
        f"{uid}:{point.savings[uid].savings_chf:7.1f}" for uid in result.unit_ids
    )
    cv_text = "   -  " if point.cv is None else f"{point.cv:8.4f}"
    marker = " <- fairest" if point.local_price == result.fair_price else ""
    print(f"{point.local_price:7.3f} {cv_text}  {sv}{marker}")

print()
print(f"suggested internal price: {result.fair_price} CHF/kWh (CV {result.cv_min:.4f})")
if result.excluded_from_cv:
    print(f"excluded from CV (negligible reference bill): {list(result.excluded_from_cv)}")

write_sweep_csv(result, out_dir / "sweep.csv")
print(f"wrote {out_dir / 'sweep.csv'}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the chart")
else:
    prices = list(result.price_grid)
    fig, ax = plt.subplots(figsize=(8, 5))
    for uid in result.unit_ids:
        series = [p.savings[uid].savings_chf for p in result.per_price]
        has_pv = series[-1] > series[0]
        ax.plot(prices, series, "--" if has_pv else ":", label=f"unit {uid}")
    ax.set_xlabel("internal exchange price CHF/kWh")
    ax.set_ylabel("annual cost saving CHF")
    ax.legend(loc="upper left", fontsize=8)
    twin = ax.twinx()
    twin.plot(prices, [p.cv for p in result.per_price], "ks-", label="CV")
    twin.set_ylabel("CV of saving percentages")
    twin.axvline(result.fair_price, color="k", linestyle=":", linewidth=1)
    fig.tight_layout()
    fig.savefig(out_dir / "sweep.png", dpi=150)
    print(f"wrote {out_dir / 'sweep.png'}")
