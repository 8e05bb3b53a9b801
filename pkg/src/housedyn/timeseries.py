"""Dated observation series: CSV ingestion, resampling, and alignment.

Every historical input (dwelling values, completions, migration, CPI,
mortgage rate, stock price) is carried as a :class:`TimeSeries` with a
declared frequency.  Period stamps always use period-end dates, matching
the quarterly reporting convention of the source data.  Missing periods
are never interpolated; downstream consumers only ever see observed rows.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import DataError, ParseError


class Frequency(str, Enum):
    DAILY = "daily"
    MONTHLY = "monthly"
    QUARTERLY = "quarterly"


# Ordering used to decide whether a resample target is coarser than the source.
_FINENESS = {Frequency.DAILY: 0, Frequency.MONTHLY: 1, Frequency.QUARTERLY: 2}

_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def month_end(year: int, month: int) -> dt.date:
    """Last calendar day of the given month."""
    if month == 2 and _is_leap(year):
        return dt.date(year, 2, 29)
    return dt.date(year, month, _DAYS_IN_MONTH[month - 1])


def quarter_end(year: int, quarter: int) -> dt.date:
    """Last calendar day of the given quarter (1-4)."""
    return month_end(year, 3 * quarter)


def month_key(d: dt.date) -> tuple[int, int]:
    return (d.year, d.month)


def quarter_key(d: dt.date) -> tuple[int, int]:
    return (d.year, (d.month - 1) // 3 + 1)


def quarter_index(d: dt.date) -> int:
    """Quarters elapsed since year 0; consecutive quarters differ by 1."""
    return d.year * 4 + (d.month - 1) // 3


@dataclass(frozen=True)
class TimeSeries:
    """Ordered sequence of dated observations with a declared frequency.

    Invariants (checked on construction): dates strictly increasing with
    no duplicates, at most one point per declared period, and every value
    finite.  Instances are immutable; all operations return new objects.
    """

    name: str
    frequency: Frequency
    dates: tuple[dt.date, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.values):
            raise DataError(
                f"series {self.name!r}: {len(self.dates)} dates but "
                f"{len(self.values)} values"
            )
        if not self.dates:
            raise DataError(f"series {self.name!r}: no observations")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise DataError(
                    f"series {self.name!r}: dates not strictly increasing "
                    f"at {cur.isoformat()}"
                )
        for d, v in zip(self.dates, self.values):
            if not math.isfinite(v):
                raise DataError(
                    f"series {self.name!r}: non-finite value at {d.isoformat()}"
                )
        if self.frequency is not Frequency.DAILY:
            keyfn = month_key if self.frequency is Frequency.MONTHLY else quarter_key
            seen: set[tuple[int, int]] = set()
            for d in self.dates:
                key = keyfn(d)
                if key in seen:
                    raise DataError(
                        f"series {self.name!r}: multiple points in "
                        f"{self.frequency.value} period containing {d.isoformat()}"
                    )
                seen.add(key)

    def __len__(self) -> int:
        return len(self.dates)

    def points(self) -> Iterable[tuple[dt.date, float]]:
        return zip(self.dates, self.values)

    def between(self, start: dt.date | None, end: dt.date | None) -> "TimeSeries":
        """Sub-series with start <= date <= end (either bound optional).

        Raises DataError if no observation falls inside the window.
        """
        kept = [
            (d, v)
            for d, v in self.points()
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        if not kept:
            raise DataError(
                f"series {self.name!r}: no observations in window "
                f"[{start}, {end}]"
            )
        dates, values = zip(*kept)
        return TimeSeries(self.name, self.frequency, tuple(dates), tuple(values))


@dataclass(frozen=True)
class AlignedFrame:
    """Several same-frequency series restricted to their common dates.

    ``columns`` maps each series label to a value sequence of the same
    length as ``dates``.
    """

    frequency: Frequency
    dates: tuple[dt.date, ...]
    columns: dict[str, tuple[float, ...]]

    def __post_init__(self) -> None:
        for name, col in self.columns.items():
            if len(col) != len(self.dates):
                raise DataError(
                    f"column {name!r} has {len(col)} values for "
                    f"{len(self.dates)} dates"
                )

    def __len__(self) -> int:
        return len(self.dates)

    def column(self, name: str) -> tuple[float, ...]:
        if name not in self.columns:
            raise DataError(f"frame has no column {name!r}")
        return self.columns[name]

    def to_series(self) -> list[TimeSeries]:
        """Reconstruct one TimeSeries per column (frame dates, frame order)."""
        return [
            TimeSeries(name, self.frequency, self.dates, col)
            for name, col in self.columns.items()
        ]

    def write_csv(self, path) -> None:
        """Export as ``date,col1,col2,...`` with round-trippable floats."""
        names = list(self.columns)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date"] + names)
            for i, d in enumerate(self.dates):
                writer.writerow(
                    [d.isoformat()] + [repr(self.columns[n][i]) for n in names]
                )


def load_csv(path, frequency: Frequency, name: str | None = None) -> TimeSeries:
    """Read a two-column ``date,value`` CSV into a validated TimeSeries.

    Parameters
    ----------
    path : str or Path
        File with header ``date,value``, ISO-8601 dates, plain decimal
        values (no thousands separators).
    frequency : Frequency
        Declared frequency of the series; validated against the dates.
    name : str, optional
        Series label; defaults to the file stem.

    Rows may appear in any order (sorting is canonicalisation). Duplicate
    dates and malformed fields are rejected with the offending line number.
    """
    label = name if name is not None else _stem(path)
    rows: list[tuple[dt.date, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["date", "value"]:
            raise ParseError(f"{path}: expected header 'date,value', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}: row {lineno}: expected 2 fields, got {len(row)}")
            try:
                d = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(f"{path}: row {lineno}: bad date {row[0]!r}") from None
            try:
                v = float(row[1])
            except ValueError:
                raise ParseError(f"{path}: row {lineno}: bad value {row[1]!r}") from None
            rows.append((d, v))
    if not rows:
        raise ParseError(f"{path}: no observations")
    rows.sort(key=lambda r: r[0])
    for (d1, _), (d2, _) in zip(rows, rows[1:]):
        if d1 == d2:
            raise DataError(f"{path}: duplicate date {d1.isoformat()}")
    dates, values = zip(*rows)
    return TimeSeries(label, frequency, tuple(dates), tuple(values))


def write_csv(series: TimeSeries, path) -> None:
    """Write ``date,value`` rows; float repr round-trips bit-equal."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "value"])
        for d, v in series.points():
            writer.writerow([d.isoformat(), repr(v)])


def resample(series: TimeSeries, target: Frequency, method: str = "mean") -> TimeSeries:
    """Aggregate to a coarser frequency, stamping each period at its end.

    ``method`` is ``"mean"`` (period average) or ``"last"`` (period-final
    value).  Periods with no source observations are simply absent from
    the output; nothing is interpolated.
    """
    target = Frequency(target)
    if target is Frequency.DAILY:
        raise DataError("cannot resample to daily")
    if _FINENESS[target] <= _FINENESS[series.frequency]:
        raise DataError(
            f"target frequency {target.value} is not coarser than "
            f"source {series.frequency.value}"
        )
    if method not in ("mean", "last"):
        raise DataError(f"unknown resample method {method!r}")

    if target is Frequency.MONTHLY:
        keyfn, endfn = month_key, month_end
    else:
        keyfn, endfn = quarter_key, quarter_end

    out_dates: list[dt.date] = []
    out_values: list[float] = []
    bucket: list[float] = []
    current: tuple[int, int] | None = None

    def flush() -> None:
        if current is None:
            return
        value = bucket[-1] if method == "last" else math.fsum(bucket) / len(bucket)
        out_dates.append(endfn(*current))
        out_values.append(value)

    for d, v in series.points():
        key = keyfn(d)
        if key != current:
            flush()
            current = key
            bucket = []
        bucket.append(v)
    flush()
    return TimeSeries(series.name, target, tuple(out_dates), tuple(out_values))


def align(series_list: Sequence[TimeSeries]) -> AlignedFrame:
    """Restrict several same-frequency series to their common dates.

    Raises DataError when frequencies differ, labels collide, or the date
    intersection is empty ("no overlapping dates").
    """
    if not series_list:
        raise DataError("align requires at least one series")
    freq = series_list[0].frequency
    for s in series_list[1:]:
        if s.frequency is not freq:
            raise DataError(
                f"cannot align {s.frequency.value} series {s.name!r} with "
                f"{freq.value} series {series_list[0].name!r}"
            )
    names = [s.name for s in series_list]
    if len(set(names)) != len(names):
        raise DataError(f"duplicate series labels in alignment: {names}")

    common = set(series_list[0].dates)
    for s in series_list[1:]:
        common &= set(s.dates)
    if not common:
        raise DataError("no overlapping dates")
    dates = tuple(sorted(common))

    columns: dict[str, tuple[float, ...]] = {}
    for s in series_list:
        lookup = dict(s.points())
        columns[s.name] = tuple(lookup[d] for d in dates)
    return AlignedFrame(freq, dates, columns)


def _stem(path) -> str:
    text = str(path)
    base = text.rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base
