"""Batch entry point: settle a scenario, compare both cases, or sweep the
internal price.

Exit codes: 0 success, 2 input or usage error, 3 internal invariant
violation (the accounting identities are asserted in production runs).
All outputs are deterministic functions of the inputs: identical
invocations produce byte-identical files and stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import InvariantViolation, LecsimError
from .report import build_run_report, metrics_json_dict, sweep_summary_dict
from .scenario import BUNDLED_SCENARIO_NAME, Scenario, load_scenario, synth_table1
from .settlement import (
    cost_lec,
    cost_reference,
    settle_lec,
    settle_reference,
    write_ledger_csv,
)
from .metrics import build_metrics_report
from .sweep import (
    DEFAULT_PRICE_MAX,
    DEFAULT_PRICE_MIN,
    DEFAULT_PRICE_STEP,
    sweep_local_price,
    write_sweep_csv,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INVARIANT_ERROR = 3


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load(args) -> Scenario:
    """Resolve --scenario: a scenario directory/manifest path, or the name of
    the bundled scenario (synthesized with --seed)."""
    ref = args.scenario
    if Path(ref).exists():
        scenario = load_scenario(ref, fill_gaps=args.fill_gaps)
    elif ref == BUNDLED_SCENARIO_NAME:
        scenario = synth_table1(seed=args.seed)
    else:
        raise LecsimError(
            f"scenario {ref!r} is neither a path nor the bundled scenario name "
            f"({BUNDLED_SCENARIO_NAME!r})"
        )
    overrides = {}
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.local_price is not None:
        overrides["local_price"] = args.local_price
    if args.levies_on_local:
        overrides["levies_on_local"] = True
    if overrides:
        scenario = replace(scenario, tariffs=replace(scenario.tariffs, **overrides))
    return scenario


def cmd_settle(args) -> int:
    scenario = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tariffs = scenario.tariffs

    if args.mode in ("ref", "both"):
        ledger = settle_reference(scenario.community)
        write_ledger_csv(ledger, out / "ledger_ref.csv")
        report = build_metrics_report(ledger, cost_reference(ledger, tariffs))
        _write_json(
            metrics_json_dict(report, scenario, tariffs, "reference", args.fill_gaps),
            out / "metrics_ref.json",
        )
    if args.mode in ("lec", "both"):
        ledger = settle_lec(scenario.community)
        write_ledger_csv(ledger, out / "ledger_lec.csv")
        report = build_metrics_report(ledger, cost_lec(ledger, tariffs))
        _write_json(
            metrics_json_dict(report, scenario, tariffs, "lec", args.fill_gaps),
            out / "metrics_lec.json",
        )
    if args.mode == "both":
        run_report = build_run_report(scenario, tariffs, fill_gaps=args.fill_gaps)
        _write_json(run_report.to_dict(), out / "run_report.json")
        deltas = run_report.deltas
        print(f"scenario: {scenario.name}")
        print(f"scr_ref: {run_report.reference.scr}")
        print(f"scr_lec: {run_report.lec.scr}")
        print(f"import_reduction_fraction: {deltas['import_reduction_fraction']}")
        print(f"export_reduction_fraction: {deltas['export_reduction_fraction']}")
    else:
        print(f"scenario: {scenario.name}")
        print(f"mode: {args.mode}")
    print(f"out: {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = sweep_local_price(
        scenario.community,
        scenario.tariffs,
        p_min=args.sweep_min,
        p_max=args.sweep_max,
        step=args.sweep_step,
    )
    write_sweep_csv(result, out / "sweep.csv")
    _write_json(sweep_summary_dict(result), out / "sweep_summary.json")
    print(f"scenario: {scenario.name}")
    print(f"grid: {len(result.price_grid)} prices in [{args.sweep_min}, {args.sweep_max}]")
    if result.fair_price is None:
        print("fair_price: CV undefined at every grid point")
    else:
        print(f"fair_price: {result.fair_price}")
        print(f"cv_min: {result.cv_min}")
    print(f"out: {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lecsim",
        description="Settlement and price-fairness analysis for local electricity communities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument(
            "--scenario",
            required=True,
            help=f"scenario directory/manifest, or {BUNDLED_SCENARIO_NAME!r} for the bundled one",
        )
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--gamma", type=float, default=None, help="network-charge reduction factor")
        p.add_argument("--local-price", type=float, default=None, help="internal price CHF/kWh")
        p.add_argument(
            "--levies-on-local",
            action="store_true",
            help="charge non-reducible levies on local purchases too",
        )
        p.add_argument("--seed", type=int, default=42, help="seed for the bundled scenario")
        p.add_argument(
            "--fill-gaps",
            choices=["zero"],
            default=None,
            help="zero-fill missing meter intervals (exploratory; recorded in reports)",
        )

    p_settle = sub.add_parser("settle", help="settle a scenario and write ledger + metrics")
    add_common(p_settle)
    p_settle.add_argument("--mode", choices=["ref", "lec", "both"], default="both")
    p_settle.set_defaults(func=cmd_settle)

    p_sweep = sub.add_parser("sweep", help="scan the internal price and score fairness")
    add_common(p_sweep)
    p_sweep.add_argument("--sweep-min", type=float, default=DEFAULT_PRICE_MIN)
    p_sweep.add_argument("--sweep-max", type=float, default=DEFAULT_PRICE_MAX)
    p_sweep.add_argument("--sweep-step", type=float, default=DEFAULT_PRICE_STEP)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT_ERROR
    except LecsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
