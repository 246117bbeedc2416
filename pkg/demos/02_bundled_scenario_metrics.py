"""
Community impact on the bundled seven-unit scenario
====================================================

Loads the built-in synthetic district (annual totals matching the published
2025 figures of a Swiss seven-unit demonstrator), settles a full year at
15-minute resolution, and compares the reference case against community
exchange: self-consumption rate, local exchange rates, grid volumes and
peaks, and who saves how much.
"""

from lecsim import build_run_report, synth_table1

scenario = synth_table1(seed=42)
print(f"scenario: {scenario.name} - {scenario.description}")
for note in scenario.provenance:
    print(f"  note: {note}")
print()

report = build_run_report(scenario)
ref, lec = report.reference, report.lec

print("=== community level ===")
print(f"self-consumption rate:  {ref.scr:.3f} -> {lec.scr:.3f}")
print(f"local exchange rates:   generation {lec.ler_gen:.3f}, consumption {lec.ler_con:.3f}")
print(f"grid import:            {ref.total_import_kwh:,.0f} -> {lec.total_import_kwh:,.0f} kWh "
      f"({report.deltas['import_reduction_fraction']:.1%} less)")
print(f"grid export:            {ref.total_export_kwh:,.0f} -> {lec.total_export_kwh:,.0f} kWh "
      f"({report.deltas['export_reduction_fraction']:.1%} less)")
print(f"peak import:            {ref.peak_import_kw:.1f} -> {lec.peak_import_kw:.1f} kW")
print(f"peak export:            {ref.peak_export_kw:.1f} -> {lec.peak_export_kw:.1f} kW")
print()

print("=== per household (internal price 0.10 CHF/kWh) ===")
print(f"{'unit':>5} {'cost ref':>10} {'cost community':>15} {'saving':>9} {'saving %':>9}")
for uid, econ in lec.per_household.items():
    ref_cost = ref.per_household[uid].cost_chf
    pct = "-" if econ.savings_pct is None else f"{econ.savings_pct:.1%}"
    print(f"{uid:>5} {ref_cost:>10.2f} {econ.cost_chf:>15.2f} {econ.savings_chf:>9.2f} {pct:>9}")
print()
print(f"fairness (CV of saving percentages) at 0.10: {report.fairness['cv']:.3f}")
print(f"price verdict: {report.fairness['local_price_verdict']}")
