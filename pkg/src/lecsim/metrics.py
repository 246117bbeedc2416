"""Community and household performance indicators computed from a settlement
ledger: self-consumption rate, local exchange rates, grid interaction, and
per-household cost savings.

Undefined ratios (zero denominators) raise UndefinedMetric; report builders
catch it and publish the metric as absent rather than zero.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, UndefinedMetric, UsageError
from .settlement import SettlementLedger

# Households whose reference cost is below this base (in absolute CHF) get no
# savings percentage: the ratio would be meaningless and would distort the
# fairness statistics downstream.
SAVINGS_PCT_MIN_BASE_CHF = 0.01

_RANGE_TOL = 1e-9

LocalExchangeRates = namedtuple("LocalExchangeRates", ["ler_gen", "ler_con"])
GridInteraction = namedtuple(
    "GridInteraction",
    ["total_import_kwh", "total_export_kwh", "peak_import_kw", "peak_export_kw"],
)
HouseholdSavings = namedtuple("HouseholdSavings", ["savings_chf", "savings_pct"])


def scr(ledger: SettlementLedger) -> float:
    """Share of total generation consumed within the community, including
    both household self-consumption and local exchange."""
    total_gen = float(np.sum(ledger.generation_kwh()))
    if total_gen <= 0:
        raise UndefinedMetric("self-consumption rate undefined: total generation is zero")
    consumed_locally = float(np.sum(ledger.local_exchange_kwh) + np.sum(ledger.self_kwh))
    return consumed_locally / total_gen


def ler_gen(ledger: SettlementLedger) -> float:
    """Locally exchanged energy relative to total generation."""
    total_gen = float(np.sum(ledger.generation_kwh()))
    if total_gen <= 0:
        raise UndefinedMetric("generation-based exchange rate undefined: zero generation")
    return float(np.sum(ledger.local_exchange_kwh)) / total_gen


def ler_con(ledger: SettlementLedger) -> float:
    """Locally exchanged energy relative to total consumption."""
    total_con = float(np.sum(ledger.consumption_kwh()))
    if total_con <= 0:
        raise UndefinedMetric("consumption-based exchange rate undefined: zero consumption")
    return float(np.sum(ledger.local_exchange_kwh)) / total_con


def ler(ledger: SettlementLedger) -> LocalExchangeRates:
    """Both local exchange rates; raises UndefinedMetric if either
    denominator is zero."""
    return LocalExchangeRates(ler_gen(ledger), ler_con(ledger))


def grid_interaction(
    ledger: SettlementLedger, resolution_minutes: int | None = None
) -> GridInteraction:
    """Total grid volumes (kWh) and community-aggregate peak powers (kW).

    Peaks are taken over the per-interval sum across households, converted
    from interval energy to average power via 60/resolution.
    """
    res = ledger.resolution_minutes if resolution_minutes is None else resolution_minutes
    if res <= 0:
        raise UsageError(f"resolution_minutes must be > 0, got {res}")
    to_kw = 60.0 / res
    import_per_t = ledger.import_kwh.sum(axis=0)
    export_per_t = ledger.export_kwh.sum(axis=0)
    return GridInteraction(
        total_import_kwh=float(import_per_t.sum()),
        total_export_kwh=float(export_per_t.sum()),
        peak_import_kw=float(import_per_t.max()) * to_kw,
        peak_export_kw=float(export_per_t.max()) * to_kw,
    )


def household_peaks_kw(ledger: SettlementLedger) -> dict[str, dict[str, float]]:
    """Per-household import/export peaks in kW, for diagnostics."""
    to_kw = 60.0 / ledger.resolution_minutes
    return {
        uid: {
            "peak_import_kw": float(ledger.import_kwh[i].max()) * to_kw,
            "peak_export_kw": float(ledger.export_kwh[i].max()) * to_kw,
        }
        for i, uid in enumerate(ledger.unit_ids)
    }


def savings(
    cost_ref: dict[str, float], cost_lec: dict[str, float]
) -> dict[str, HouseholdSavings]:
    """Per-household cost reduction from community participation.

    savings_chf = reference cost minus community cost; savings_pct uses the
    absolute reference cost as base so the sign stays meaningful for net
    earners, and is None when that base is below SAVINGS_PCT_MIN_BASE_CHF.
    """
    if set(cost_ref) != set(cost_lec):
        raise UsageError("savings requires the same household set in both cost maps")
    out = {}
    for uid in cost_ref:
        delta = cost_ref[uid] - cost_lec[uid]
        base = abs(cost_ref[uid])
        pct = delta / base if base > SAVINGS_PCT_MIN_BASE_CHF else None
        out[uid] = HouseholdSavings(savings_chf=delta, savings_pct=pct)
    return out


@dataclass(frozen=True)
class HouseholdEconomics:
    cost_chf: float
    savings_chf: float | None = None
    savings_pct: float | None = None
    peak_import_kw: float = 0.0
    peak_export_kw: float = 0.0

    def to_dict(self) -> dict:
        return {
            "cost_chf": self.cost_chf,
            "savings_chf": self.savings_chf,
            "savings_pct": self.savings_pct,
            "peak_import_kw": self.peak_import_kw,
            "peak_export_kw": self.peak_export_kw,
        }


@dataclass(frozen=True)
class MetricsReport:
    """All indicators for one settlement mode. Ratio metrics are None when
    their denominator is zero (absent, not 0)."""

    scr: float | None
    ler_gen: float | None
    ler_con: float | None
    total_import_kwh: float
    total_export_kwh: float
    peak_import_kw: float
    peak_export_kw: float
    per_household: dict[str, HouseholdEconomics] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("scr", "ler_gen", "ler_con"):
            value = getattr(self, name)
            if value is not None and not -_RANGE_TOL <= value <= 1.0 + _RANGE_TOL:
                raise InvariantViolation(f"{name} outside [0, 1]: {value}")
        if self.scr is not None and self.ler_gen is not None:
            if self.ler_gen > self.scr + _RANGE_TOL:
                raise InvariantViolation(
                    f"ler_gen ({self.ler_gen}) exceeds scr ({self.scr})"
                )
        for name in (
            "total_import_kwh",
            "total_export_kwh",
            "peak_import_kw",
            "peak_export_kw",
        ):
            if getattr(self, name) < 0:
                raise InvariantViolation(f"{name} must be >= 0")

    def to_dict(self) -> dict:
        return {
            "scr": self.scr,
            "ler_gen": self.ler_gen,
            "ler_con": self.ler_con,
            "total_import_kwh": self.total_import_kwh,
            "total_export_kwh": self.total_export_kwh,
            "peak_import_kw": self.peak_import_kw,
            "peak_export_kw": self.peak_export_kw,
            "per_household": {
                uid: econ.to_dict() for uid, econ in self.per_household.items()
            },
        }


def build_metrics_report(
    ledger: SettlementLedger,
    costs: dict[str, float],
    household_savings: dict[str, HouseholdSavings] | None = None,
) -> MetricsReport:
    """Assemble the full report for one ledger; savings fields stay None for
    single-mode runs where no counterfactual cost exists."""

    def _try(fn):
        try:
            return fn(ledger)
        except UndefinedMetric:
            return None

    grid = grid_interaction(ledger)
    peaks = household_peaks_kw(ledger)
    per_household = {}
    for uid in ledger.unit_ids:
        sv = household_savings.get(uid) if household_savings else None
        per_household[uid] = HouseholdEconomics(
            cost_chf=costs[uid],
            savings_chf=sv.savings_chf if sv else None,
            savings_pct=sv.savings_pct if sv else None,
            peak_import_kw=peaks[uid]["peak_import_kw"],
            peak_export_kw=peaks[uid]["peak_export_kw"],
        )
    return MetricsReport(
        scr=_try(scr),
        ler_gen=_try(ler_gen),
        ler_con=_try(ler_con),
        total_import_kwh=grid.total_import_kwh,
        total_export_kwh=grid.total_export_kwh,
        peak_import_kw=grid.peak_import_kw,
        peak_export_kw=grid.peak_export_kw,
        per_household=per_household,
    )
