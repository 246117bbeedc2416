"""Interval metering domain model: series, household meters, community loading.

All energy values are kWh per interval (not average kW). Timestamps are
interval-start, UTC. Two series are aligned iff they share start, resolution,
and length; every settlement operation requires an aligned community.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import AlignmentError, DataError

TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"

CSV_COLUMNS = ("timestamp", "unit_id", "consumption_kwh", "generation_kwh")


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    try:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise DataError(f"invalid timestamp {text!r}: {exc}") from None
    if ts.tzinfo is None:
        raise DataError(f"timestamp {text!r} has no timezone offset")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime(TIMESTAMP_FMT)


def _as_readonly_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"series values must be one-dimensional, got shape {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IntervalSeries:
    """Fixed-resolution energy series in kWh per interval.

    Immutable after construction; the values array is marked read-only.
    """

    start: datetime
    values: np.ndarray
    resolution_minutes: int = 15

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSeries):
            return NotImplemented
        return (
            self.start == other.start
            and self.resolution_minutes == other.resolution_minutes
            and np.array_equal(self.values, other.values)
        )

    def __post_init__(self):
        if self.start.tzinfo is None:
            raise DataError("series start must be timezone-aware (UTC)")
        object.__setattr__(self, "start", self.start.astimezone(timezone.utc))
        if self.resolution_minutes <= 0:
            raise DataError(f"resolution_minutes must be > 0, got {self.resolution_minutes}")
        arr = _as_readonly_array(self.values)
        if arr.size < 1:
            raise DataError("series must contain at least one interval")
        if not np.all(np.isfinite(arr)):
            raise DataError("series contains NaN or infinite values")
        if np.any(arr < 0):
            raise DataError("series contains negative energy values")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def resolution(self) -> timedelta:
        return timedelta(minutes=self.resolution_minutes)

    def timestamps(self) -> list[datetime]:
        """Interval-start timestamps for every entry."""
        return [self.start + i * self.resolution for i in range(len(self))]

    def total_kwh(self) -> float:
        return float(np.sum(self.values))

    def aligned_with(self, other: "IntervalSeries") -> bool:
        return (
            self.start == other.start
            and self.resolution_minutes == other.resolution_minutes
            and len(self) == len(other)
        )


def zero_series_like(series: IntervalSeries) -> IntervalSeries:
    return IntervalSeries(
        start=series.start,
        values=np.zeros(len(series)),
        resolution_minutes=series.resolution_minutes,
    )


@dataclass(frozen=True)
class HouseholdMeter:
    """One participant's metered consumption and generation.

    Non-PV units carry an all-zero generation series of the same shape.
    """

    id: str
    consumption: IntervalSeries
    generation: IntervalSeries

    def __post_init__(self):
        if not self.id:
            raise DataError("household id must be a non-empty string")
        if not self.consumption.aligned_with(self.generation):
            raise AlignmentError(
                f"unit {self.id!r}: consumption and generation series are not aligned"
            )


@dataclass(frozen=True)
class Community:
    """Ordered, non-empty collection of households with pairwise-aligned series.

    A community of pure consumers is legal input; local exchange is then
    identically zero.
    """

    households: tuple[HouseholdMeter, ...] = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(self.households)
        if not members:
            raise DataError("community must contain at least one household")
        ids = [h.id for h in members]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"duplicate household ids in community: {dupes}")
        ref = members[0].consumption
        for h in members[1:]:
            if not h.consumption.aligned_with(ref):
                raise AlignmentError(
                    f"unit {h.id!r} series are not aligned with unit {members[0].id!r}"
                )
        object.__setattr__(self, "households", members)

    def __len__(self) -> int:
        return len(self.households)

    @property
    def ids(self) -> list[str]:
        return [h.id for h in self.households]

    @property
    def n_intervals(self) -> int:
        return len(self.households[0].consumption)

    @property
    def start(self) -> datetime:
        return self.households[0].consumption.start

    @property
    def resolution_minutes(self) -> int:
        return self.households[0].consumption.resolution_minutes

    def consumption_matrix(self) -> np.ndarray:
        """(n_households, n_intervals) consumption array, row order = household order."""
        return np.vstack([h.consumption.values for h in self.households])

    def generation_matrix(self) -> np.ndarray:
        return np.vstack([h.generation.values for h in self.households])


def annual_totals(community: Community) -> dict[str, dict[str, float]]:
    """Per-household sums over the full horizon, in kWh.

    Used to verify scenario files against published annual figures.
    """
    return {
        h.id: {
            "consumption_kwh": h.consumption.total_kwh(),
            "generation_kwh": h.generation.total_kwh(),
        }
        for h in community.households
    }


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

MeterSource = Union[str, Path, io.TextIOBase, Iterable[str]]


def _open_rows(source: MeterSource):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    return None


def load_community(source: MeterSource, fill_gaps: str | None = None) -> Community:
    """Load a community from meter CSV records.

    Expected header: ``timestamp,unit_id,consumption_kwh,generation_kwh``;
    the generation column may be absent (all units become pure consumers).
    Timestamps must be strictly increasing per unit with constant spacing.

    fill_gaps=None (default) rejects missing intervals; fill_gaps="zero"
    zero-fills every unit onto the union time grid (exploratory use only,
    the flag is recorded in report metadata by callers).
    """
    if fill_gaps not in (None, "zero"):
        raise DataError(f"unsupported fill_gaps mode: {fill_gaps!r}")

    handle = _open_rows(source)
    try:
        stream = handle if handle is not None else source
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("meter CSV is empty (missing header)") from None
        header = [h.strip() for h in header]
        columns = {name: idx for idx, name in enumerate(header)}
        for required in ("timestamp", "unit_id", "consumption_kwh"):
            if required not in columns:
                raise DataError(f"meter CSV is missing required column {required!r}")
        has_generation = "generation_kwh" in columns

        ts_col = columns["timestamp"]
        unit_col = columns["unit_id"]
        con_col = columns["consumption_kwh"]
        gen_col = columns["generation_kwh"] if has_generation else None

        # unit_id -> (timestamps, consumption, generation), first-seen order
        units: dict[str, tuple[list[datetime], list[float], list[float]]] = {}
        seen: dict[str, set[datetime]] = {}
        ts_cache: dict[str, datetime] = {}  # units share stamps; parse each once

        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            unit = row[unit_col].strip()
            if not unit:
                raise DataError(f"line {lineno}: empty unit_id")
            ts_text = row[ts_col].strip()
            ts = ts_cache.get(ts_text)
            if ts is None:
                ts = parse_timestamp(ts_text)
                ts_cache[ts_text] = ts
            con = _parse_energy(row[con_col], unit, ts, "consumption_kwh", lineno, required=True)
            if gen_col is not None:
                gen = _parse_energy(row[gen_col], unit, ts, "generation_kwh", lineno, required=False)
            else:
                gen = 0.0

            if unit not in units:
                units[unit] = ([], [], [])
                seen[unit] = set()
            if ts in seen[unit]:
                raise DataError(
                    f"duplicate reading for unit {unit!r} at {format_timestamp(ts)}"
                )
            seen[unit].add(ts)
            tss, cons, gens = units[unit]
            tss.append(ts)
            cons.append(con)
            gens.append(gen)
    finally:
        if handle is not None:
            handle.close()

    if not units:
        raise DataError("meter CSV contains no data rows")

    for unit, (tss, _, _) in units.items():
        for prev, cur in zip(tss, tss[1:]):
            if cur <= prev:
                raise AlignmentError(
                    f"unit {unit!r}: timestamps not strictly increasing at "
                    f"{format_timestamp(cur)}"
                )

    resolution = _infer_resolution(units)
    if fill_gaps == "zero":
        units = _zero_fill_to_union_grid(units, resolution)
    else:
        _check_constant_spacing(units, resolution)

    households = []
    for unit, (tss, cons, gens) in units.items():
        start = tss[0]
        households.append(
            HouseholdMeter(
                id=unit,
                consumption=IntervalSeries(start, cons, resolution),
                generation=IntervalSeries(start, gens, resolution),
            )
        )
    return Community(households=tuple(households))


def _parse_energy(
    cell: str, unit: str, ts: datetime, column: str, lineno: int, required: bool
) -> float:
    where = f"line {lineno}: unit {unit!r} at {format_timestamp(ts)}"
    text = cell.strip()
    if not text:
        if required:
            raise DataError(f"{where}: empty {column} value")
        return 0.0
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{where}: unparseable {column} {cell!r}") from None
    if not np.isfinite(value):
        raise DataError(f"{where}: {column} is not finite")
    if value < 0:
        raise DataError(f"{where}: negative {column} ({value})")
    return value


def _infer_resolution(units) -> int:
    """Smallest observed spacing, required to be whole minutes."""
    best: timedelta | None = None
    for tss, _, _ in units.values():
        for prev, cur in zip(tss, tss[1:]):
            delta = cur - prev
            if best is None or delta < best:
                best = delta
    if best is None:
        return 15  # every unit has a single reading; assume DSO default
    minutes = best.total_seconds() / 60.0
    if minutes <= 0 or minutes != int(minutes):
        raise AlignmentError(f"cannot infer a whole-minute resolution from spacing {best}")
    return int(minutes)


def _check_constant_spacing(units, resolution: int) -> None:
    step = timedelta(minutes=resolution)
    starts = set()
    lengths = set()
    for unit, (tss, _, _) in units.items():
        for prev, cur in zip(tss, tss[1:]):
            if cur - prev != step:
                raise AlignmentError(
                    f"unit {unit!r}: gap or irregular spacing between "
                    f"{format_timestamp(prev)} and {format_timestamp(cur)} "
                    f"(expected {resolution} min)"
                )
        starts.add(tss[0])
        lengths.add(len(tss))
    if len(starts) > 1 or len(lengths) > 1:
        raise AlignmentError(
            "units do not cover the same horizon "
            f"(starts: {sorted(format_timestamp(s) for s in starts)}, "
            f"lengths: {sorted(lengths)})"
        )


def _zero_fill_to_union_grid(units, resolution: int):
    step = timedelta(minutes=resolution)
    grid_start = min(tss[0] for tss, _, _ in units.values())
    grid_end = max(tss[-1] for tss, _, _ in units.values())
    n = int((grid_end - grid_start) / step) + 1

    filled = {}
    for unit, (tss, cons, gens) in units.items():
        con_grid = [0.0] * n
        gen_grid = [0.0] * n
        grid_ts = [grid_start + i * step for i in range(n)]
        for ts, con, gen in zip(tss, cons, gens):
            offset = (ts - grid_start) / step
            if offset != int(offset):
                raise AlignmentError(
                    f"unit {unit!r}: timestamp {format_timestamp(ts)} is not on the "
                    f"{resolution}-minute grid starting {format_timestamp(grid_start)}"
                )
            idx = int(offset)
            con_grid[idx] = con
            gen_grid[idx] = gen
        filled[unit] = (grid_ts, con_grid, gen_grid)
    return filled


def save_community(community: Community, path: str | Path) -> None:
    """Write meter CSV that round-trips bit-exactly through load_community.

    Floats are written with repr, the shortest representation that parses
    back to the identical double.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for h in community.households:
            stamps = h.consumption.timestamps()
            for ts, con, gen in zip(stamps, h.consumption.values, h.generation.values):
                writer.writerow(
                    [format_timestamp(ts), h.id, repr(float(con)), repr(float(gen))]
                )
