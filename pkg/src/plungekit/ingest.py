"""
Loading and calendar alignment of daily sector price panels and monthly PE series.

Price panels are wide CSV files::

    date,Auto,Bankex,...,Sensex
    2006-01-02,4012.5,5230.1,...,9390.14

PE series are two-column CSV files with header ``month,pe`` and ``YYYY-MM`` keys.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import logging
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from plungekit.errors import InputError

logger = logging.getLogger(__name__)


class Month(NamedTuple):
    """Calendar month key; orders chronologically and prints as ``YYYY-MM``."""

    year: int
    month: int

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @classmethod
    def parse(cls, text: str) -> "Month":
        try:
            year_s, month_s = text.strip().split("-")
            key = cls(int(year_s), int(month_s))
        except ValueError:
            raise InputError(f"bad month key {text!r}, expected YYYY-MM") from None
        if not 1 <= key.month <= 12 or len(year_s) != 4:
            raise InputError(f"bad month key {text!r}, expected YYYY-MM")
        return key

    @classmethod
    def of(cls, day: dt.date) -> "Month":
        return cls(day.year, day.month)

    def next(self) -> "Month":
        if self.month == 12:
            return Month(self.year + 1, 1)
        return Month(self.year, self.month + 1)

    def previous(self) -> "Month":
        if self.month == 1:
            return Month(self.year - 1, 12)
        return Month(self.year, self.month - 1)


class MissingCellAction(str, enum.Enum):
    DROP_DATE = "drop_date"
    FAIL = "fail"


@dataclass(frozen=True)
class IngestPolicy:
    missing_cell_action: MissingCellAction = MissingCellAction.DROP_DATE
    min_days_per_month: int = 15
    benchmark_name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "missing_cell_action", MissingCellAction(self.missing_cell_action))
        if self.min_days_per_month < 2:
            raise InputError(f"min_days_per_month must be >= 2, got {self.min_days_per_month}")


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Aligned daily closing levels, rows are trading dates and columns entities."""

    entities: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen(self.values))
        t, n = len(self.dates), len(self.entities)
        if self.values.shape != (t, n):
            raise InputError(f"values shape {self.values.shape} does not match {t} dates x {n} entities")
        if len(set(self.entities)) != n:
            raise InputError("duplicate entity names")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise InputError("dates must be strictly increasing")
        if t and not np.all(self.values > 0):
            raise InputError("non-positive price")
        if t and not np.all(np.isfinite(self.values)):
            raise InputError("non-finite price")

    def __eq__(self, other):
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (self.entities, self.dates) == (other.entities, other.dates) and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    def column(self, entity: str) -> np.ndarray:
        return self.values[:, self.entities.index(entity)]


@dataclass(frozen=True, eq=False)
class PESeries:
    months: tuple[Month, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "months", tuple(Month(*m) for m in self.months))
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != (len(self.months),):
            raise InputError("PE months and values differ in length")
        if any(b <= a for a, b in zip(self.months, self.months[1:])):
            raise InputError("PE months must be strictly increasing")
        if not np.all(self.values > 0):
            raise InputError("non-positive PE")

    def __eq__(self, other):
        if not isinstance(other, PESeries):
            return NotImplemented
        return self.months == other.months and np.array_equal(self.values, other.values)

    __hash__ = None

    def __len__(self) -> int:
        return len(self.months)

    def as_dict(self) -> dict[Month, float]:
        return {m: float(v) for m, v in zip(self.months, self.values)}


@dataclass(frozen=True)
class MonthWindow:
    """Contiguous half-open row range ``[start, stop)`` belonging to one calendar month."""

    month: Month
    start: int
    stop: int
    valid: bool

    @property
    def n_days(self) -> int:
        return self.stop - self.start

    @property
    def rows(self) -> slice:
        return slice(self.start, self.stop)


def _parse_date(text: str, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise InputError(f"line {lineno}: bad date {text!r}, expected YYYY-MM-DD") from None


def _parse_price(text: str, lineno: int) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"line {lineno}: bad number {text!r}") from None
    if math.isnan(value):
        return None
    return value


def load_price_panel(path: str | os.PathLike, policy: IngestPolicy = IngestPolicy()) -> PricePanel:
    """Read a wide price CSV into a :class:`PricePanel`.

    Rows with a blank or non-positive cell are dropped under ``drop_date``;
    under ``fail`` they raise :class:`InputError`. Rows are sorted by date,
    duplicates are an error.
    """
    try:
        with open(path, newline="") as fh:
            return _read_price_panel(fh, policy, str(path))
    except OSError as exc:
        raise InputError(f"cannot read price file {path}: {exc.strerror or exc}") from exc


def _read_price_panel(fh, policy: IngestPolicy, source: str) -> PricePanel:
    reader = csv.reader(fh)
    header = next(reader, None)
    if not header or header[0].strip().lower() != "date" or len(header) < 2:
        raise InputError(f"{source}: header must start with 'date' followed by entity names")
    entities = [h.strip() for h in header[1:]]
    if any(not e for e in entities):
        raise InputError(f"{source}: empty entity name in header")
    if len(set(entities)) != len(entities):
        raise InputError(f"{source}: duplicate entity name in header")
    if policy.benchmark_name is not None and policy.benchmark_name not in entities:
        raise InputError(f"{source}: benchmark {policy.benchmark_name!r} not among columns")

    rows: list[tuple[dt.date, list[float]]] = []
    dropped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{source}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        day = _parse_date(row[0], lineno)
        cells = [_parse_price(c, lineno) for c in row[1:]]
        bad = [c for c in cells if c is None or c <= 0 or not math.isfinite(c)]
        if bad:
            if policy.missing_cell_action is MissingCellAction.FAIL:
                if any(c is None for c in bad):
                    raise InputError(f"{source}: line {lineno}: missing price")
                raise InputError(f"{source}: line {lineno}: non-positive price")
            dropped += 1
            continue
        rows.append((day, cells))

    if dropped:
        logger.info("%s: dropped %d dates with missing or non-positive cells", source, dropped)
    if not rows:
        raise InputError(f"{source}: empty panel after drops")

    rows.sort(key=lambda r: r[0])
    for (a, _), (b, _) in zip(rows, rows[1:]):
        if a == b:
            raise InputError(f"{source}: duplicate date {a.isoformat()}")
    return PricePanel(entities, [r[0] for r in rows], [r[1] for r in rows])


def load_pe_series(path: str | os.PathLike) -> PESeries:
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read PE file {path}: {exc.strerror or exc}") from exc
    return parse_pe_series(text, str(path))


def parse_pe_series(text: str, source: str = "<pe>") -> PESeries:
    reader = csv.reader(io.StringIO(text))
    header = [h.strip().lower() for h in next(reader, [])]
    if header != ["month", "pe"]:
        raise InputError(f"{source}: header must be 'month,pe'")
    seen: dict[Month, float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise InputError(f"{source}: line {lineno}: expected 2 fields, got {len(row)}")
        month = Month.parse(row[0])
        try:
            value = float(row[1])
        except ValueError:
            raise InputError(f"{source}: line {lineno}: bad PE {row[1]!r}") from None
        if not value > 0 or not math.isfinite(value):
            raise InputError(f"{source}: line {lineno}: non-positive PE")
        if month in seen:
            raise InputError(f"{source}: line {lineno}: duplicate month {month}")
        seen[month] = value
    months = sorted(seen)
    return PESeries(months, [seen[m] for m in months])


def format_price_panel(panel: PricePanel) -> str:
    """Serialise a panel in the wide CSV format, values at 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *panel.entities])
    for day, row in zip(panel.dates, panel.values):
        writer.writerow([day.isoformat(), *(f"{v:.12g}" for v in row)])
    return buf.getvalue()


def format_pe_series(pe: PESeries) -> str:
    lines = ["month,pe"]
    lines += [f"{m},{v:.12g}" for m, v in zip(pe.months, pe.values)]
    return "\n".join(lines) + "\n"


def month_windows(panel, policy: IngestPolicy = IngestPolicy()) -> list[MonthWindow]:
    """Split the rows of ``panel`` into calendar-month windows.

    Works on anything with a sorted ``dates`` sequence (price or return panels).
    Months with fewer than ``policy.min_days_per_month`` rows are kept in the
    partition but marked ``valid=False``.
    """
    dates: Sequence[dt.date] = panel.dates
    windows: list[MonthWindow] = []
    start = 0
    for i in range(1, len(dates) + 1):
        if i == len(dates) or Month.of(dates[i]) != Month.of(dates[start]):
            n = i - start
            windows.append(MonthWindow(Month.of(dates[start]), start, i, n >= policy.min_days_per_month))
            start = i
    return windows
