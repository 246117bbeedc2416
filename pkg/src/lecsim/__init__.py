"""lecsim: settlement and techno-economic assessment for Swiss-style local
electricity communities on 15-minute metering data.

Core objects: a Community of household meters, a TariffSchedule, the
settlement engine producing a SettlementLedger for the reference (no
community exchange) and community cases, performance metrics, and an
internal-price sweep scoring fairness by the coefficient of variation of
household savings.
"""

from .errors import (
    AlignmentError,
    ConfigError,
    DataError,
    InvariantViolation,
    LecsimError,
    UndefinedMetric,
    UsageError,
)
from .metering import (
    Community,
    HouseholdMeter,
    IntervalSeries,
    annual_totals,
    load_community,
    save_community,
)
from .metrics import (
    GridInteraction,
    HouseholdSavings,
    LocalExchangeRates,
    MetricsReport,
    build_metrics_report,
    grid_interaction,
    ler,
    ler_con,
    ler_gen,
    savings,
    scr,
)
from .report import RunReport, build_run_report, compute_deltas
from .scenario import (
    Scenario,
    load_scenario,
    save_scenario,
    scenario_hash,
    synth_table1,
)
from .settlement import (
    LEC,
    REFERENCE,
    SettlementLedger,
    cost_lec,
    cost_reference,
    household_totals,
    self_consume,
    settle_lec,
    settle_reference,
    write_ledger_csv,
)
from .sweep import SweepResult, cv, price_grid, sweep_local_price, write_sweep_csv
from .tariffs import (
    TariffSchedule,
    energy_price,
    local_buy_unit_cost,
    tariffs_from_config,
    validate_local_price,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "Community",
    "ConfigError",
    "DataError",
    "GridInteraction",
    "HouseholdMeter",
    "HouseholdSavings",
    "IntervalSeries",
    "InvariantViolation",
    "LEC",
    "LecsimError",
    "LocalExchangeRates",
    "MetricsReport",
    "REFERENCE",
    "RunReport",
    "Scenario",
    "SettlementLedger",
    "SweepResult",
    "TariffSchedule",
    "UndefinedMetric",
    "UsageError",
    "annual_totals",
    "build_metrics_report",
    "build_run_report",
    "compute_deltas",
    "cost_lec",
    "cost_reference",
    "cv",
    "energy_price",
    "grid_interaction",
    "household_totals",
    "ler",
    "ler_con",
    "ler_gen",
    "load_community",
    "load_scenario",
    "local_buy_unit_cost",
    "price_grid",
    "save_community",
    "save_scenario",
    "savings",
    "scenario_hash",
    "scr",
    "self_consume",
    "settle_lec",
    "settle_reference",
    "sweep_local_price",
    "synth_table1",
    "tariffs_from_config",
    "validate_local_price",
    "write_ledger_csv",
    "write_sweep_csv",
]
