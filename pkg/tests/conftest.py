"""Shared fixtures and randomized-case generators for the test suite."""

from datetime import datetime, timezone

import numpy as np
import pytest

from lecsim import Community, HouseholdMeter, IntervalSeries, TariffSchedule
from lecsim.tariffs import energy_price

T0 = datetime(2025, 1, 1, tzinfo=timezone.utc)


def make_community(rows, start=T0, resolution=15):
    """rows: list of (unit_id, consumption list, generation list)."""
    households = []
    for uid, con, gen in rows:
        households.append(
            HouseholdMeter(
                id=uid,
                consumption=IntervalSeries(start, con, resolution),
                generation=IntervalSeries(start, gen, resolution),
            )
        )
    return Community(households=tuple(households))


def random_community(rng: np.random.Generator, n_households=None, n_intervals=None):
    """Random community with plenty of degenerate intervals: zero demand,
    zero generation, pure-consumer units, and surplus/deficit extremes."""
    n = int(n_households if n_households is not None else rng.integers(2, 7))
    t = int(n_intervals if n_intervals is not None else rng.integers(96, 193))
    rows = []
    for i in range(n):
        con = rng.uniform(0.0, 3.0, t)
        con[rng.random(t) < 0.15] = 0.0
        if rng.random() < 0.4:
            gen = np.zeros(t)
        else:
            gen = rng.uniform(0.0, 4.0, t)
            gen[rng.random(t) < 0.5] = 0.0
        rows.append((f"u{i}", con, gen))
    return make_community(rows)


def random_tariffs(rng: np.random.Generator, fair_local_price=True) -> TariffSchedule:
    retail = float(rng.uniform(0.10, 0.40))
    network_fee = float(rng.uniform(0.0, 0.4)) * retail
    levies = float(rng.uniform(0.0, 0.2)) * retail
    e_price = retail - network_fee - levies
    feed_in = float(rng.uniform(0.0, e_price))
    if fair_local_price:
        local = float(rng.uniform(feed_in, e_price))
    else:
        local = float(rng.uniform(0.0, retail))
    return TariffSchedule(
        retail_import=retail,
        feed_in=feed_in,
        local_price=local,
        network_fee=network_fee,
        levies=levies,
        gamma=float(rng.choice([0.2, 0.4])),
        levies_on_local=bool(rng.random() < 0.5),
    )


@pytest.fixture
def default_tariffs():
    return TariffSchedule()


@pytest.fixture
def two_unit_community():
    """A buyer (pure consumer) and a seller (pure producer), one interval."""
    return make_community([("buyer", [10.0], [0.0]), ("seller", [0.0], [10.0])])


def assert_fair(tariffs: TariffSchedule):
    assert tariffs.feed_in <= tariffs.local_price <= energy_price(tariffs)
