"""Internal-price sensitivity analysis: evaluate household savings over a
price grid and score each price by the coefficient of variation of the
saving percentages.

The settlement itself is price-independent (allocation depends only on
energy), so the community is settled once and only costs are re-evaluated
per grid point. The fairest price is found by exhaustive scan; the CV is
generally not convex in the price, so no descent shortcut is taken.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import UndefinedMetric, UsageError
from .metering import Community
from .metrics import HouseholdSavings, savings
from .settlement import cost_from_totals, household_totals, settle_lec, settle_reference
from .tariffs import TariffSchedule

DEFAULT_PRICE_MIN = 0.06
DEFAULT_PRICE_MAX = 0.12
DEFAULT_PRICE_STEP = 0.005

# Grid prices are rounded to this many decimals so 0.06 + k*0.005 yields the
# exact values callers and the UI expect to address rows by.
_GRID_DECIMALS = 10


def cv(savings_pct: Iterable[float]) -> float:
    """Coefficient of variation: population standard deviation over |mean|.

    Requires at least two defined values and a non-zero mean.
    """
    values = np.asarray(list(savings_pct), dtype=np.float64)
    if values.size < 2:
        raise UndefinedMetric(f"CV needs at least 2 values, got {values.size}")
    mean = float(values.mean())
    if mean == 0.0:
        raise UndefinedMetric("CV undefined: mean saving percentage is zero")
    return float(values.std()) / abs(mean)


def price_grid(p_min: float, p_max: float, step: float) -> list[float]:
    """Ascending grid p_min, p_min+step, ... capped at p_max (inclusive)."""
    if step <= 0:
        raise UsageError(f"sweep step must be > 0, got {step}")
    if p_min > p_max:
        raise UsageError(f"sweep range is empty: min {p_min} > max {p_max}")
    grid = []
    k = 0
    while True:
        p = round(p_min + k * step, _GRID_DECIMALS)
        if p > p_max + 1e-12:
            break
        grid.append(p)
        k += 1
    return grid


@dataclass(frozen=True)
class PricePoint:
    """Savings and fairness score at one grid price. cv is None where the
    metric is undefined (too few households with a usable percentage, or a
    zero mean)."""

    local_price: float
    cv: float | None
    savings: dict[str, HouseholdSavings]

    def to_dict(self) -> dict:
        return {
            "local_price": self.local_price,
            "cv": self.cv,
            "savings_chf": {uid: sv.savings_chf for uid, sv in self.savings.items()},
            "savings_pct": {uid: sv.savings_pct for uid, sv in self.savings.items()},
        }


@dataclass(frozen=True)
class SweepResult:
    price_grid: tuple[float, ...]
    per_price: tuple[PricePoint, ...]
    fair_price: float | None
    cv_min: float | None
    excluded_from_cv: tuple[str, ...] = field(default_factory=tuple)
    unit_ids: tuple[str, ...] = field(default_factory=tuple)

    def point_at(self, price: float) -> PricePoint:
        for point in self.per_price:
            if point.local_price == price:
                return point
        raise UsageError(f"price {price} is not on the sweep grid")

    def to_dict(self) -> dict:
        return {
            "price_grid": list(self.price_grid),
            "per_price": [p.to_dict() for p in self.per_price],
            "fair_price": self.fair_price,
            "cv_min": self.cv_min,
            "excluded_from_cv": list(self.excluded_from_cv),
            "unit_ids": list(self.unit_ids),
        }


def sweep_local_price(
    community: Community,
    tariffs: TariffSchedule,
    p_min: float = DEFAULT_PRICE_MIN,
    p_max: float = DEFAULT_PRICE_MAX,
    step: float = DEFAULT_PRICE_STEP,
) -> SweepResult:
    """Exhaustive scan of the internal price over [p_min, p_max].

    fair_price is the grid point minimizing the CV of saving percentages,
    ties broken toward the lower price; grid points where the CV is
    undefined are recorded with cv=None and excluded from the argmin.
    """
    if p_min < 0:
        raise UsageError(f"sweep prices must be >= 0, got min {p_min}")
    if p_max > tariffs.retail_import:
        raise UsageError(
            f"sweep max {p_max} exceeds the retail import tariff {tariffs.retail_import}"
        )
    grid = price_grid(p_min, p_max, step)

    ledger_ref = settle_reference(community)
    ledger_lec = settle_lec(community)
    totals_ref = household_totals(ledger_ref)
    totals_lec = household_totals(ledger_lec)
    cost_ref = cost_from_totals(totals_ref, tariffs)

    points = []
    fair_price = None
    cv_min = None
    excluded: tuple[str, ...] = ()
    for p in grid:
        schedule = tariffs.with_local_price(p)
        cost_lec_p = cost_from_totals(totals_lec, schedule)
        sv = savings(cost_ref, cost_lec_p)
        defined = [s.savings_pct for s in sv.values() if s.savings_pct is not None]
        # Exclusions depend only on the price-independent reference cost.
        excluded = tuple(uid for uid, s in sv.items() if s.savings_pct is None)
        try:
            score = cv(defined)
        except UndefinedMetric:
            score = None
        points.append(PricePoint(local_price=p, cv=score, savings=sv))
        if score is not None and (cv_min is None or score < cv_min):
            cv_min = score
            fair_price = p

    return SweepResult(
        price_grid=tuple(grid),
        per_price=tuple(points),
        fair_price=fair_price,
        cv_min=cv_min,
        excluded_from_cv=excluded,
        unit_ids=tuple(community.ids),
    )


def write_sweep_csv(result: SweepResult, path: str | Path) -> None:
    """One row per grid price: local_price, cv (empty when undefined), then
    one savings column per household."""
    header = ["local_price", "cv"] + [f"unit_{uid}_savings_chf" for uid in result.unit_ids]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for point in result.per_price:
            row = [repr(point.local_price), "" if point.cv is None else repr(point.cv)]
            row += [repr(point.savings[uid].savings_chf) for uid in result.unit_ids]
            writer.writerow(row)
