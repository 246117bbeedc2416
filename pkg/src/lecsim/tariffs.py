"""Price schedule for community settlement and the fair-band check on the
internal exchange price.

All prices are flat (time-invariant) CHF/kWh. The retail import tariff is
treated as containing its energy, network, and levy components; the energy
component (retail minus network fee minus levies) is the upper bound of the
fair internal-price interval, the feed-in remuneration the lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from .errors import ConfigError, DataError

# Verdicts returned by validate_local_price. Out-of-band prices are reported,
# not rejected: the law leaves the internal price to the community.
FAIR = "fair"
BELOW_FEED_IN = "below_feed_in"
ABOVE_ENERGY_PRICE = "above_energy_price"

# Network-charge reduction presets: 0.4 when local exchange does not change
# voltage level, 0.2 otherwise. Callers declare which applies.
GAMMA_SAME_VOLTAGE_LEVEL = 0.4
GAMMA_CROSS_VOLTAGE_LEVEL = 0.2


@dataclass(frozen=True)
class TariffSchedule:
    """All prices used in settlement, in CHF/kWh, plus the reduction factor.

    levies_on_local: when True, non-reducible levies are also charged on
    locally bought energy (stricter reading); default False charges local
    purchases the local price plus the reduced network fee only.
    """

    retail_import: float = 0.241
    feed_in: float = 0.06
    local_price: float = 0.10
    network_fee: float = 0.0859
    levies: float = 0.0344
    gamma: float = GAMMA_SAME_VOLTAGE_LEVEL
    levies_on_local: bool = False

    def __post_init__(self):
        for name in ("retail_import", "feed_in", "local_price", "network_fee", "levies"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise DataError(f"tariff {name} must be a number, got {value!r}")
            if not math.isfinite(value) or value < 0:
                raise DataError(f"tariff {name} must be finite and >= 0, got {value}")
        if not 0.0 <= self.gamma <= 1.0:
            raise DataError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.network_fee + self.levies > self.retail_import + 1e-12:
            raise DataError(
                "network_fee + levies exceed retail_import "
                f"({self.network_fee} + {self.levies} > {self.retail_import})"
            )

    def with_local_price(self, price: float) -> "TariffSchedule":
        return replace(self, local_price=price)


def energy_price(t: TariffSchedule) -> float:
    """Energy component of the retail tariff: retail minus network fee minus levies.

    This is the upper bound of the fair internal-price interval.
    """
    return t.retail_import - t.network_fee - t.levies


def local_buy_unit_cost(t: TariffSchedule) -> float:
    """Effective cost per locally bought kWh: internal price plus reduced
    network fee (plus levies when levies_on_local is set)."""
    cost = t.local_price + (1.0 - t.gamma) * t.network_fee
    if t.levies_on_local:
        cost += t.levies
    return cost


def validate_local_price(t: TariffSchedule) -> str:
    """Classify the internal price against the fair band [feed_in, energy_price]."""
    if t.local_price < t.feed_in:
        return BELOW_FEED_IN
    if t.local_price > energy_price(t):
        return ABOVE_ENERGY_PRICE
    return FAIR


# ---------------------------------------------------------------------------
# Config block handling
# ---------------------------------------------------------------------------

_TARIFF_KEYS = {
    "retail_import",
    "feed_in",
    "local_price",
    "network_fee",
    "levies",
    "gamma",
    "levies_on_local",
}


def tariffs_from_config(config: Mapping) -> TariffSchedule:
    """Build a schedule from a ``tariffs`` config mapping.

    Unknown keys raise ConfigError naming the key; missing keys fall back
    to the defaults of TariffSchedule.
    """
    unknown = set(config) - _TARIFF_KEYS
    if unknown:
        raise ConfigError(f"unknown tariff key(s): {sorted(unknown)}")
    kwargs = dict(config)
    if "levies_on_local" in kwargs:
        flag = kwargs["levies_on_local"]
        if not isinstance(flag, bool):
            raise ConfigError(f"levies_on_local must be a boolean, got {flag!r}")
    try:
        return TariffSchedule(**kwargs)
    except DataError as exc:
        raise ConfigError(str(exc)) from None


def tariffs_to_config(t: TariffSchedule) -> dict:
    return {
        "retail_import": t.retail_import,
        "feed_in": t.feed_in,
        "local_price": t.local_price,
        "network_fee": t.network_fee,
        "levies": t.levies,
        "gamma": t.gamma,
        "levies_on_local": t.levies_on_local,
    }
