"""Time-series container, CSV ingestion and load-data preprocessing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, time, timezone
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Input data cannot be turned into a valid series."""


@dataclass(frozen=True)
class TimeSeries:
    """Ordered scalar samples with optional UTC timestamps.

    ``timestamps`` is a ``datetime64[s]`` array (UTC) when present.
    """

    values: np.ndarray
    timestamps: np.ndarray | None = None
    sample_interval: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise DataError("series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype="datetime64[s]").reshape(-1)
            if ts.shape != values.shape:
                raise DataError(
                    f"timestamps length {ts.size} != values length {values.size}"
                )
            if ts.size > 1 and not np.all(ts[1:] > ts[:-1]):
                raise DataError("timestamps must be strictly increasing")
            ts.setflags(write=False)
            object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return self.values.size

    def with_values(self, values) -> "TimeSeries":
        """Same timestamps and spacing, new sample values."""
        return TimeSeries(values, self.timestamps, self.sample_interval)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_dev: float
    min: float
    max: float
    count: int


def _require_nonempty(ts: TimeSeries):
    if len(ts) == 0:
        raise DataError("series is empty")


def summary_stats(ts: TimeSeries) -> SummaryStats:
    """Mean, population standard deviation (ddof=0), range and count."""
    _require_nonempty(ts)
    v = ts.values
    mean = float(np.mean(v))
    std = float(np.std(v))
    # guard the min <= mean <= max invariant against rounding
    lo, hi = float(v.min()), float(v.max())
    mean = min(max(mean, lo), hi)
    return SummaryStats(mean=mean, std_dev=std, min=lo, max=hi, count=int(v.size))


def parse_timestamp(text: str) -> np.datetime64:
    """Parse RFC 3339 (fixed offsets allowed) or epoch seconds into UTC."""
    s = text.strip()
    try:
        epoch = float(s)
    except ValueError:
        pass
    else:
        if not math.isfinite(epoch):
            raise DataError(f"bad timestamp {text!r}")
        return np.datetime64(int(round(epoch)), "s")
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(s)
    except ValueError as exc:
        raise DataError(f"bad timestamp {text!r}") from exc
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return np.datetime64(dt.replace(microsecond=0), "s")


def _column_index(header: list[str], column: str | int, what: str) -> int:
    if isinstance(column, int) or (isinstance(column, str) and column.isdigit()
                                   and column not in header):
        idx = int(column)
        if not 0 <= idx < len(header):
            raise DataError(f"{what} column index {idx} out of range")
        return idx
    try:
        return header.index(column)
    except ValueError:
        raise DataError(f"{what} column {column!r} not found in header {header}") from None


def load_csv(
    path: str | Path,
    column: str | int = 0,
    timestamp_column: str | int | None = None,
    delimiter: str = ",",
) -> TimeSeries:
    """Read one numeric column (and optionally timestamps) from a CSV file.

    A header row is required. Blank lines are ignored; any cell that does not
    parse as a finite real number raises :class:`DataError` naming its row
    (1-based, counting the header as row 1).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path} is empty")
        header = [h.strip() for h in header]
        vidx = _column_index(header, column, "value")
        tidx = None if timestamp_column is None else _column_index(
            header, timestamp_column, "timestamp")
        values, stamps = [], []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            rownum = reader.line_num
            if vidx >= len(row):
                raise DataError(f"row {rownum}: missing value column")
            cell = row[vidx].strip()
            try:
                val = float(cell)
            except ValueError:
                raise DataError(f"row {rownum}: non-numeric value {cell!r}") from None
            if not math.isfinite(val):
                raise DataError(f"row {rownum}: non-finite value {cell!r}")
            values.append(val)
            if tidx is not None:
                if tidx >= len(row):
                    raise DataError(f"row {rownum}: missing timestamp column")
                try:
                    stamps.append(parse_timestamp(row[tidx]))
                except DataError as exc:
                    raise DataError(f"row {rownum}: {exc}") from None
    if not values:
        raise DataError(f"{path} contains no data rows")
    timestamps = np.array(stamps, dtype="datetime64[s]") if tidx is not None else None
    return TimeSeries(np.array(values), timestamps)


def _parse_clock(t: time | str) -> int:
    """Seconds since midnight."""
    if isinstance(t, str):
        t = time.fromisoformat(t)
    return t.hour * 3600 + t.minute * 60 + t.second


def _seconds_of_day(stamps: np.ndarray) -> np.ndarray:
    secs = stamps.astype("datetime64[s]").astype(np.int64)
    return np.mod(secs, 86400)


def in_window(stamps: np.ndarray, start: time | str, end: time | str) -> np.ndarray:
    """Mask of timestamps whose clock time lies in ``[start, end)``.

    Windows wrap past midnight when ``start > end``; ``start == end`` covers
    the whole day.
    """
    s, e = _parse_clock(start), _parse_clock(end)
    sod = _seconds_of_day(stamps)
    if s < e:
        return (sod >= s) & (sod < e)
    if s > e:
        return (sod >= s) | (sod < e)
    return np.ones(stamps.shape, dtype=bool)


def operational_filter(
    ts: TimeSeries,
    night_start: time | str = "22:00",
    night_end: time | str = "06:00",
    threshold: float | None = None,
) -> tuple[TimeSeries, float]:
    """Keep the "on" samples: values strictly above the night-time maximum.

    The threshold is the largest reading time-stamped inside the night
    window, unless passed explicitly. Kept samples are concatenated in order
    with their original timestamps; gaps are not bridged.
    """
    if ts.timestamps is None:
        raise DataError("operational filter needs timestamps")
    if threshold is None:
        mask = in_window(ts.timestamps, night_start, night_end)
        if not mask.any():
            raise DataError("no samples fall in the night window")
        threshold = float(ts.values[mask].max())
    keep = ts.values > threshold
    out = TimeSeries(ts.values[keep], ts.timestamps[keep], ts.sample_interval)
    return out, float(threshold)


def split_days(ts: TimeSeries) -> list[TimeSeries]:
    """Split a time-stamped series into per-calendar-day (UTC) segments."""
    if ts.timestamps is None:
        raise DataError("splitting by day needs timestamps")
    days = ts.timestamps.astype("datetime64[D]")
    if len(ts) == 0:
        return []
    cuts = np.flatnonzero(days[1:] != days[:-1]) + 1
    bounds = np.concatenate([[0], cuts, [len(ts)]])
    return [
        TimeSeries(ts.values[a:b], ts.timestamps[a:b], ts.sample_interval)
        for a, b in zip(bounds[:-1], bounds[1:])
    ]


DAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


@dataclass(frozen=True)
class GroupSummary:
    group: str
    count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float


def group_distribution(ts: TimeSeries, key: str = "day-of-week") -> list[GroupSummary]:
    """Five-number summary of the readings per weekday or per hour.

    Only populated groups are returned, in calendar order. Quartiles use
    linear interpolation between order statistics.
    """
    if ts.timestamps is None:
        raise DataError("grouping needs timestamps")
    secs = ts.timestamps.astype(np.int64)
    if key == "day-of-week":
        # 1970-01-01 was a Thursday
        codes = (np.floor_divide(secs, 86400) + 3) % 7
        labels = DAY_NAMES
    elif key == "hour-of-day":
        codes = np.floor_divide(np.mod(secs, 86400), 3600)
        labels = tuple(f"{h:02d}" for h in range(24))
    else:
        raise ValueError(f"unknown grouping key {key!r}")
    rows = []
    for code, label in enumerate(labels):
        vals = ts.values[codes == code]
        if vals.size == 0:
            continue
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        rows.append(GroupSummary(label, int(vals.size), float(vals.min()), float(q1),
                                 float(med), float(q3), float(vals.max())))
    return rows
