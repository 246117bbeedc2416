"""Per-interval settlement: household self-consumption, community allocation,
grid residuals, and the cost of each household under both cases.

The model is interval-local (no storage, no inter-temporal coupling).
Reference case: every household settles alone, surplus is exported.
Community case: after self-consumption, the community exchanges
min(total surplus, total residual demand) internally; buyers receive it in
proportion to residual demand, sellers are debited in proportion to surplus.
Grid import/export are computed as residuals of that allocation so the
energy-balance identities hold to rounding; tiny negative rounding residues
are clamped to zero only after the balance check.
"""

from __future__ import annotations

import csv
from collections import namedtuple
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .errors import DataError, InvariantViolation, UsageError
from .metering import Community, format_timestamp
from .tariffs import TariffSchedule, local_buy_unit_cost

REFERENCE = "reference"
LEC = "lec"

# Absolute tolerance for all energy-balance identities, in kWh.
BALANCE_TOL_KWH = 1e-9

SelfConsumption = namedtuple("SelfConsumption", ["self_consumed", "residual_demand", "surplus"])


def self_consume(consumption, generation) -> SelfConsumption:
    """Split metered energy into self-consumed, residual demand, and surplus.

    Accepts scalars or arrays. At most one of residual_demand and surplus is
    non-zero at any point.
    """
    con = np.asarray(consumption, dtype=np.float64)
    gen = np.asarray(generation, dtype=np.float64)
    if np.any(con < 0) or np.any(gen < 0):
        raise DataError("consumption and generation must be >= 0")
    self_consumed = np.minimum(con, gen)
    result = SelfConsumption(self_consumed, con - self_consumed, gen - self_consumed)
    if con.ndim == 0:
        return SelfConsumption(*(float(x) for x in result))
    return result


@dataclass(frozen=True)
class SettlementLedger:
    """Full per-household, per-interval settlement decomposition.

    Arrays are (n_households, n_intervals) in kWh; local_exchange_kwh is the
    community total exchanged per interval. Row order matches unit_ids.
    """

    mode: str
    unit_ids: tuple[str, ...]
    start: datetime
    resolution_minutes: int
    self_kwh: np.ndarray
    local_buy_kwh: np.ndarray
    local_sell_kwh: np.ndarray
    import_kwh: np.ndarray
    export_kwh: np.ndarray
    local_exchange_kwh: np.ndarray

    def __post_init__(self):
        if self.mode not in (REFERENCE, LEC):
            raise UsageError(f"unknown ledger mode {self.mode!r}")
        n, t = len(self.unit_ids), None
        for name in ("self_kwh", "local_buy_kwh", "local_sell_kwh", "import_kwh", "export_kwh"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != n:
                raise UsageError(f"{name} must have shape (n_households, n_intervals)")
            t = arr.shape[1] if t is None else t
            if arr.shape[1] != t:
                raise UsageError("ledger arrays disagree on the number of intervals")
            if np.any(arr < 0):
                raise InvariantViolation(f"{name} contains negative energy")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        ploc = np.asarray(self.local_exchange_kwh, dtype=np.float64)
        if ploc.shape != (t,):
            raise UsageError("local_exchange_kwh must have one entry per interval")
        ploc = ploc.copy()
        ploc.setflags(write=False)
        object.__setattr__(self, "local_exchange_kwh", ploc)

        if self.mode == REFERENCE:
            if np.any(self.local_buy_kwh != 0) or np.any(self.local_sell_kwh != 0):
                raise InvariantViolation("reference ledger must have zero local exchange")
        buy_total = self.local_buy_kwh.sum(axis=0)
        sell_total = self.local_sell_kwh.sum(axis=0)
        if np.max(np.abs(buy_total - ploc), initial=0.0) > BALANCE_TOL_KWH:
            raise InvariantViolation("sum of local buys does not match community exchange")
        if np.max(np.abs(sell_total - ploc), initial=0.0) > BALANCE_TOL_KWH:
            raise InvariantViolation("sum of local sells does not match community exchange")

    @property
    def n_households(self) -> int:
        return len(self.unit_ids)

    @property
    def n_intervals(self) -> int:
        return self.self_kwh.shape[1]

    def consumption_kwh(self) -> np.ndarray:
        """Reconstructed consumption: self + local buy + import."""
        return self.self_kwh + self.local_buy_kwh + self.import_kwh

    def generation_kwh(self) -> np.ndarray:
        """Reconstructed generation: self + local sell + export."""
        return self.self_kwh + self.local_sell_kwh + self.export_kwh

    def household_index(self, unit_id: str) -> int:
        try:
            return self.unit_ids.index(unit_id)
        except ValueError:
            raise UsageError(f"unknown unit id {unit_id!r}") from None

    def timestamps(self) -> list[datetime]:
        step = timedelta(minutes=self.resolution_minutes)
        return [self.start + i * step for i in range(self.n_intervals)]


def _finalize(arrays: list[np.ndarray]) -> list[np.ndarray]:
    """Clamp tiny negative rounding residues to zero (post balance check)."""
    out = []
    for arr in arrays:
        low = np.min(arr, initial=0.0)
        if low < -BALANCE_TOL_KWH:
            raise InvariantViolation(f"settlement produced negative energy ({low} kWh)")
        out.append(np.maximum(arr, 0.0))
    return out


def settle_reference(community: Community) -> SettlementLedger:
    """Settle each household alone: residual demand imported, surplus exported."""
    con = community.consumption_matrix()
    gen = community.generation_matrix()
    self_kwh = np.minimum(con, gen)
    imports = con - self_kwh
    exports = gen - self_kwh
    imports, exports = _finalize([imports, exports])
    zeros = np.zeros_like(con)
    return SettlementLedger(
        mode=REFERENCE,
        unit_ids=tuple(community.ids),
        start=community.start,
        resolution_minutes=community.resolution_minutes,
        self_kwh=self_kwh,
        local_buy_kwh=zeros,
        local_sell_kwh=zeros,
        import_kwh=imports,
        export_kwh=exports,
        local_exchange_kwh=np.zeros(con.shape[1]),
    )


def settle_lec(community: Community) -> SettlementLedger:
    """Settle with community exchange: proportional allocation of the locally
    exchanged energy, grid flows as residuals of the allocation."""
    con = community.consumption_matrix()
    gen = community.generation_matrix()
    self_kwh = np.minimum(con, gen)
    residual = con - self_kwh
    surplus = gen - self_kwh

    total_res = residual.sum(axis=0)
    total_sur = surplus.sum(axis=0)
    p_loc = np.minimum(total_sur, total_res)

    # Allocation is zero by definition wherever the community aggregate is zero.
    buy_ratio = np.divide(
        p_loc, total_res, out=np.zeros_like(p_loc), where=total_res > 0
    )
    sell_ratio = np.divide(
        p_loc, total_sur, out=np.zeros_like(p_loc), where=total_sur > 0
    )
    local_buy = residual * buy_ratio
    local_sell = surplus * sell_ratio
    imports = residual - local_buy
    exports = surplus - local_sell

    _check_community_balance(local_buy, local_sell, p_loc)
    imports, exports, local_buy, local_sell = _finalize(
        [imports, exports, local_buy, local_sell]
    )
    return SettlementLedger(
        mode=LEC,
        unit_ids=tuple(community.ids),
        start=community.start,
        resolution_minutes=community.resolution_minutes,
        self_kwh=self_kwh,
        local_buy_kwh=local_buy,
        local_sell_kwh=local_sell,
        import_kwh=imports,
        export_kwh=exports,
        local_exchange_kwh=p_loc,
    )


def _check_community_balance(local_buy, local_sell, p_loc) -> None:
    buy_err = np.max(np.abs(local_buy.sum(axis=0) - p_loc), initial=0.0)
    sell_err = np.max(np.abs(local_sell.sum(axis=0) - p_loc), initial=0.0)
    if buy_err > BALANCE_TOL_KWH or sell_err > BALANCE_TOL_KWH:
        raise InvariantViolation(
            f"community exchange imbalance (buy err {buy_err}, sell err {sell_err} kWh)"
        )


HouseholdTotals = namedtuple(
    "HouseholdTotals",
    ["unit_ids", "self_kwh", "local_buy_kwh", "local_sell_kwh", "import_kwh", "export_kwh"],
)


def household_totals(ledger: SettlementLedger) -> HouseholdTotals:
    """Per-household sums over the horizon, one array entry per unit."""
    return HouseholdTotals(
        unit_ids=ledger.unit_ids,
        self_kwh=ledger.self_kwh.sum(axis=1),
        local_buy_kwh=ledger.local_buy_kwh.sum(axis=1),
        local_sell_kwh=ledger.local_sell_kwh.sum(axis=1),
        import_kwh=ledger.import_kwh.sum(axis=1),
        export_kwh=ledger.export_kwh.sum(axis=1),
    )


def cost_from_totals(totals: HouseholdTotals, tariffs: TariffSchedule) -> dict[str, float]:
    """Household cost from energy totals; local terms vanish for reference
    ledgers where the local totals are zero."""
    costs = (
        totals.local_buy_kwh * local_buy_unit_cost(tariffs)
        - totals.local_sell_kwh * tariffs.local_price
        + totals.import_kwh * tariffs.retail_import
        - totals.export_kwh * tariffs.feed_in
    )
    return {uid: float(c) for uid, c in zip(totals.unit_ids, costs)}


def cost_reference(ledger: SettlementLedger, tariffs: TariffSchedule) -> dict[str, float]:
    """Per-household cost over the horizon in the reference case, CHF.

    Imports are billed at the retail tariff, exports credited at the feed-in
    remuneration; net earners have negative cost.
    """
    if ledger.mode != REFERENCE:
        raise UsageError(f"cost_reference requires a reference ledger, got {ledger.mode!r}")
    return cost_from_totals(household_totals(ledger), tariffs)


def cost_lec(ledger: SettlementLedger, tariffs: TariffSchedule) -> dict[str, float]:
    """Per-household cost over the horizon in the community case, CHF.

    Local purchases pay the internal price plus the reduced network fee
    (plus levies when levies_on_local is set); local sales earn the internal
    price; residual grid flows are billed as in the reference case.
    """
    if ledger.mode != LEC:
        raise UsageError(f"cost_lec requires a community ledger, got {ledger.mode!r}")
    return cost_from_totals(household_totals(ledger), tariffs)


LEDGER_CSV_COLUMNS = (
    "unit_id",
    "timestamp",
    "self_kwh",
    "local_buy_kwh",
    "local_sell_kwh",
    "import_kwh",
    "export_kwh",
)


def write_ledger_csv(ledger: SettlementLedger, path: str | Path) -> None:
    """Export the ledger, one row per (unit, interval). Reference mode writes
    zeros in the local columns."""
    stamps = [format_timestamp(ts) for ts in ledger.timestamps()]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEDGER_CSV_COLUMNS)
        for i, uid in enumerate(ledger.unit_ids):
            for j, stamp in enumerate(stamps):
                writer.writerow(
                    [
                        uid,
                        stamp,
                        repr(float(ledger.self_kwh[i, j])),
                        repr(float(ledger.local_buy_kwh[i, j])),
                        repr(float(ledger.local_sell_kwh[i, j])),
                        repr(float(ledger.import_kwh[i, j])),
                        repr(float(ledger.export_kwh[i, j])),
                    ]
                )
