"""Run reports: the combined reference/community evaluation consumed by the
CLI (``--mode both``), the HTTP service, and the negotiation UI.

One composition path serves all entry points so a price evaluated anywhere
yields byte-identical numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UndefinedMetric
from .metrics import (
    MetricsReport,
    build_metrics_report,
    savings,
)
from .scenario import Scenario, scenario_hash
from .settlement import cost_lec, cost_reference, settle_lec, settle_reference
from .sweep import SweepResult, cv
from .tariffs import TariffSchedule, tariffs_to_config, validate_local_price


@dataclass(frozen=True)
class RunReport:
    """Reference and community metrics side by side, with derived deltas and
    the fairness view of the current internal price."""

    scenario_name: str
    scenario_hash: str
    provenance: tuple[str, ...]
    tariffs: TariffSchedule
    reference: MetricsReport
    lec: MetricsReport
    deltas: dict
    fairness: dict
    fill_gaps: str | None = None

    def to_dict(self) -> dict:
        return {
            "meta": {
                "scenario_name": self.scenario_name,
                "scenario_hash": self.scenario_hash,
                "provenance": list(self.provenance),
                "tariffs": tariffs_to_config(self.tariffs),
                "fill_gaps": self.fill_gaps,
            },
            "reference": self.reference.to_dict(),
            "lec": self.lec.to_dict(),
            "deltas": self.deltas,
            "fairness": self.fairness,
        }


def _reduction_fraction(ref_value: float, lec_value: float) -> float | None:
    if ref_value <= 0:
        return None
    return (ref_value - lec_value) / ref_value


def compute_deltas(reference: MetricsReport, lec: MetricsReport) -> dict:
    """Grid-relief quantities comparing the two cases; fractions are None
    where the reference total is zero."""
    return {
        "import_reduction_fraction": _reduction_fraction(
            reference.total_import_kwh, lec.total_import_kwh
        ),
        "export_reduction_fraction": _reduction_fraction(
            reference.total_export_kwh, lec.total_export_kwh
        ),
        "peak_import_change_kw": lec.peak_import_kw - reference.peak_import_kw,
        "peak_export_change_kw": lec.peak_export_kw - reference.peak_export_kw,
        "peak_import_reduction_fraction": _reduction_fraction(
            reference.peak_import_kw, lec.peak_import_kw
        ),
        "peak_export_reduction_fraction": _reduction_fraction(
            reference.peak_export_kw, lec.peak_export_kw
        ),
    }


def build_run_report(
    scenario: Scenario,
    tariffs: TariffSchedule | None = None,
    fill_gaps: str | None = None,
) -> RunReport:
    """Settle both cases and assemble the full comparison report.

    tariffs overrides the scenario's bundled schedule (used for what-if
    evaluation at a different internal price or gamma).
    """
    schedule = scenario.tariffs if tariffs is None else tariffs
    ledger_ref = settle_reference(scenario.community)
    ledger_lec = settle_lec(scenario.community)
    costs_ref = cost_reference(ledger_ref, schedule)
    costs_lec = cost_lec(ledger_lec, schedule)
    household_savings = savings(costs_ref, costs_lec)

    reference = build_metrics_report(ledger_ref, costs_ref)
    lec = build_metrics_report(ledger_lec, costs_lec, household_savings)

    defined_pcts = [s.savings_pct for s in household_savings.values() if s.savings_pct is not None]
    try:
        fairness_cv = cv(defined_pcts)
    except UndefinedMetric:
        fairness_cv = None
    fairness = {
        "local_price": schedule.local_price,
        "cv": fairness_cv,
        "excluded_from_cv": [
            uid for uid, s in household_savings.items() if s.savings_pct is None
        ],
        "local_price_verdict": validate_local_price(schedule),
    }
    return RunReport(
        scenario_name=scenario.name,
        scenario_hash=scenario_hash(scenario),
        provenance=scenario.provenance,
        tariffs=schedule,
        reference=reference,
        lec=lec,
        deltas=compute_deltas(reference, lec),
        fairness=fairness,
        fill_gaps=fill_gaps,
    )


def metrics_json_dict(
    report: MetricsReport,
    scenario: Scenario,
    tariffs: TariffSchedule,
    mode: str,
    fill_gaps: str | None = None,
) -> dict:
    """Single-mode metrics document: report fields plus the meta block."""
    return {
        **report.to_dict(),
        "meta": {
            "mode": mode,
            "scenario_name": scenario.name,
            "scenario_hash": scenario_hash(scenario),
            "provenance": list(scenario.provenance),
            "tariffs": tariffs_to_config(tariffs),
            "fill_gaps": fill_gaps,
        },
    }


def sweep_summary_dict(result: SweepResult) -> dict:
    """Compact fairness summary written beside the sweep CSV."""
    return {
        "fair_price": result.fair_price,
        "cv_min": result.cv_min,
        "price_grid": list(result.price_grid),
        "excluded_from_cv": list(result.excluded_from_cv),
        "cv_by_price": [[p.local_price, p.cv] for p in result.per_price],
    }
