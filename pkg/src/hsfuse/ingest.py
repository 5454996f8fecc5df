"""Real-data ingestion: CSV signal reading, linear interpolation of missing
values, and fixed-window averaging."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MISSING_TOKENS",
    "TimedSeries",
    "read_signal_csv",
    "interpolate_missing",
    "window_average",
]

# Case-insensitive markers treated as missing values in CSV fields.
MISSING_TOKENS = {"", "na", "nan"}


@dataclass(frozen=True)
class TimedSeries:
    """Values over strictly increasing timestamps; NaN marks a missing value."""

    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.timestamps, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.ndim != 1:
            raise ValueError("timestamps and values must be one-dimensional")
        if t.size != v.size:
            raise ValueError(
                f"length mismatch: {t.size} timestamps vs {v.size} values"
            )
        if t.size == 0:
            raise ValueError("series must be nonempty")
        if not np.all(np.isfinite(t)):
            raise ValueError("timestamps must be finite")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def n_missing(self) -> int:
        return int(np.count_nonzero(np.isnan(self.values)))


def _parse_field(token: str, path, lineno: int, column) -> float:
    token = token.strip()
    if token.lower() in MISSING_TOKENS:
        return np.nan
    try:
        return float(token)
    except ValueError:
        raise ValueError(
            f"{path}: line {lineno}: could not parse {token!r} in column {column!r}"
        ) from None


def read_signal_csv(path, column=0, time_column=None) -> TimedSeries:
    """Read one numeric column (plus an optional timestamp column) from a CSV.

    ``column``/``time_column`` may be 0-based indices or header names; a
    header row is detected automatically when the first row fails numeric
    parsing.  Empty fields, ``NA`` and ``NaN`` (any case) become missing.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1)
                if row and any(field.strip() for field in row)]
    if not rows:
        raise ValueError(f"{path}: no data rows")

    header: list[str] | None = None
    first_fields = [f.strip() for f in rows[0][1]]

    def _numeric_or_missing(token: str) -> bool:
        if token.lower() in MISSING_TOKENS:
            return True
        try:
            float(token)
            return True
        except ValueError:
            return False

    if not all(_numeric_or_missing(f) for f in first_fields):
        header = first_fields
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: header but no data rows")

    def _resolve(spec, name: str) -> int:
        if isinstance(spec, str):
            if header is None:
                raise ValueError(
                    f"{path}: {name} {spec!r} needs a header row"
                )
            try:
                return header.index(spec)
            except ValueError:
                raise ValueError(
                    f"{path}: {name} {spec!r} not found in header {header}"
                ) from None
        return int(spec)

    value_idx = _resolve(column, "column")
    time_idx = _resolve(time_column, "time column") if time_column is not None else None

    values = []
    times = []
    for lineno, row in rows:
        if value_idx >= len(row) or (time_idx is not None and time_idx >= len(row)):
            raise ValueError(f"{path}: line {lineno}: too few fields ({len(row)})")
        values.append(_parse_field(row[value_idx], path, lineno, column))
        if time_idx is not None:
            t = _parse_field(row[time_idx], path, lineno, time_column)
            if np.isnan(t):
                raise ValueError(f"{path}: line {lineno}: missing timestamp")
            times.append(t)
    values_arr = np.asarray(values, dtype=float)
    if np.all(np.isnan(values_arr)):
        raise ValueError(f"{path}: column {column!r} contains no observed values")
    timestamps = np.asarray(times) if time_idx is not None else np.arange(
        values_arr.size, dtype=float
    )
    return TimedSeries(timestamps=timestamps, values=values_arr)


def interpolate_missing(ts: TimedSeries, extend_ends: bool = False) -> TimedSeries:
    """Replace every missing value by linear interpolation in timestamp space.

    Missing endpoints are an error unless ``extend_ends`` is set, in which
    case they take the nearest observed value.  Present values are unchanged;
    applying the operation twice is a no-op.
    """
    values = ts.values.copy()
    missing = np.isnan(values)
    if not missing.any():
        return TimedSeries(timestamps=ts.timestamps.copy(), values=values)
    if missing.all():
        raise ValueError("cannot interpolate an all-missing series")
    if (missing[0] or missing[-1]) and not extend_ends:
        raise ValueError(
            "missing endpoint; pass extend_ends=True to extend the nearest value"
        )
    present = ~missing
    values[missing] = np.interp(
        ts.timestamps[missing], ts.timestamps[present], ts.values[present]
    )
    return TimedSeries(timestamps=ts.timestamps.copy(), values=values)


def window_average(
    ts: TimedSeries, window: int, allow_partial: bool = False
) -> TimedSeries:
    """Non-overlapping block means of consecutive values.

    The series length must be divisible by ``window`` unless
    ``allow_partial`` is set, in which case the trailing shorter block is
    averaged as-is.  Timestamps are averaged per block.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n = ts.n
    if n % window != 0 and not allow_partial:
        raise ValueError(
            f"length {n} not divisible by window {window}; "
            "pass allow_partial=True to average the trailing block"
        )
    starts = np.arange(0, n, window)
    counts = np.diff(np.append(starts, n))
    values = np.add.reduceat(ts.values, starts) / counts
    timestamps = np.add.reduceat(ts.timestamps, starts) / counts
    return TimedSeries(timestamps=timestamps, values=values)
