"""
Two-parameter crash classifier on the monthly (LECM, PE) pair.

A month is a *Crash* when the largest correlation eigenvalue and the
benchmark PE ratio are both at or above their thresholds, a *Crisis* when
only the eigenvalue condition holds (or PE is unknown), and *Normal*
otherwise. Mean, stdev and minimum of the correlations only raise
informational flags.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

from plungekit.errors import InputError
from plungekit.ingest import Month, PESeries


class Label(str, enum.Enum):
    NORMAL = "Normal"
    CRISIS = "Crisis"
    CRASH = "Crash"

    def __str__(self) -> str:
        return self.value


class Flag(str, enum.Enum):
    HIGH_MEAN = "high_mean"
    LOW_STDEV = "low_stdev"
    HIGH_MIN_CORR = "high_min_corr"


@dataclass(frozen=True)
class IndicatorConfig:
    pe_min: float = 20.0
    lecm_min: float = 11.0
    mean_corr_min: float | None = 0.80
    min_corr_min: float | None = 0.65
    stdev_max: float | None = 0.12
    persistence_months: int = 1

    def __post_init__(self):
        if not self.pe_min > 0:
            raise InputError(f"pe_min must be positive, got {self.pe_min}")
        if not self.lecm_min >= 1:
            raise InputError(f"lecm_min must be >= 1, got {self.lecm_min}")
        if self.persistence_months < 1:
            raise InputError(f"persistence_months must be >= 1, got {self.persistence_months}")


@dataclass(frozen=True)
class MonthLabel:
    month: Month
    label: Label
    lecm: float
    pe: float | None
    auxiliary_flags: frozenset[Flag] = frozenset()
    metrics: object = field(default=None, repr=False, compare=False)


class Interval(NamedTuple):
    start: Month
    end: Month
    label: Label

    def months(self) -> list[Month]:
        out = [self.start]
        while out[-1] != self.end:
            out.append(out[-1].next())
        return out


@dataclass(frozen=True)
class Report:
    per_month: tuple[MonthLabel, ...]
    intervals: tuple[Interval, ...]
    config: IndicatorConfig
    connectedness_threshold: float | None = None

    def months_labelled(self, label: Label) -> list[Month]:
        return [m.month for m in self.per_month if m.label is label]

    def interval_months(self, label: Label) -> list[Month]:
        return [m for iv in self.intervals if iv.label is label for m in iv.months()]


class ParameterPoint(NamedTuple):
    month: Month
    lecm: float
    pe: float
    label: Label


def classify_month(lecm: float, pe: float | None, config: IndicatorConfig = IndicatorConfig()) -> Label:
    if lecm < config.lecm_min:
        return Label.NORMAL
    if pe is not None and pe >= config.pe_min:
        return Label.CRASH
    return Label.CRISIS


def _flags(stats, config: IndicatorConfig) -> frozenset[Flag]:
    if stats is None:
        return frozenset()
    flags = set()
    if config.mean_corr_min is not None and stats.mean > config.mean_corr_min:
        flags.add(Flag.HIGH_MEAN)
    if config.stdev_max is not None and stats.stdev < config.stdev_max:
        flags.add(Flag.LOW_STDEV)
    if config.min_corr_min is not None and stats.min > config.min_corr_min:
        flags.add(Flag.HIGH_MIN_CORR)
    return frozenset(flags)


def extract_intervals(labels: Sequence[MonthLabel], persistence: int = 1) -> list[Interval]:
    """Maximal runs of one non-Normal label over calendar-adjacent months."""
    intervals = []
    run: list[MonthLabel] = []

    def close():
        if run and run[0].label is not Label.NORMAL and len(run) >= persistence:
            intervals.append(Interval(run[0].month, run[-1].month, run[0].label))

    for ml in labels:
        if run and (ml.label is not run[-1].label or ml.month != run[-1].month.next()):
            close()
            run = []
        run.append(ml)
    close()
    return intervals


def label_series(metrics, pe: PESeries | None = None, config: IndicatorConfig = IndicatorConfig()) -> Report:
    """Label every month in ``metrics`` and collect crisis/crash intervals.

    ``metrics`` is a chronological sequence of objects exposing ``month`` and
    ``lecm`` (normally :class:`~plungekit.pipeline.WindowMetrics`). Months
    without a PE observation are labelled with PE missing.
    """
    pe_by_month = pe.as_dict() if pe is not None else {}
    labels = []
    for m in sorted(metrics, key=lambda m: m.month):
        corr = getattr(m, "corr", None)
        if corr is not None and config.lecm_min > corr.n:
            raise InputError(f"lecm_min {config.lecm_min} exceeds matrix size {corr.n}")
        month_pe = pe_by_month.get(m.month)
        labels.append(
            MonthLabel(
                month=m.month,
                label=classify_month(m.lecm, month_pe, config),
                lecm=float(m.lecm),
                pe=month_pe,
                auxiliary_flags=_flags(getattr(m, "corr_stats", None), config),
                metrics=m,
            )
        )
    threshold = None
    graphs = getattr(metrics[0], "graphs", ()) if len(metrics) else ()
    if graphs:
        threshold = graphs[0].threshold
    return Report(tuple(labels), tuple(extract_intervals(labels, config.persistence_months)), config, threshold)


def parameter_space(report: Report) -> list[ParameterPoint]:
    return [ParameterPoint(m.month, m.lecm, m.pe, m.label) for m in report.per_month if m.pe is not None]


CSV_FIELDS = (
    "month",
    "label",
    "lecm",
    "pe",
    "connectedness",
    "corr_mean",
    "corr_stdev",
    "corr_min",
    "eigenvalues",
    "flags",
)


def _num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(x)


def _month_record(ml: MonthLabel) -> dict:
    m = ml.metrics
    stats = getattr(m, "corr_stats", None)
    spectrum = getattr(m, "spectrum", None)
    graphs = getattr(m, "graphs", ())
    return {
        "month": str(ml.month),
        "label": ml.label.value,
        "lecm": ml.lecm,
        "pe": _num(ml.pe),
        "connectedness": graphs[0].edge_count if graphs else None,
        "corr_mean": stats.mean if stats else None,
        "corr_stdev": stats.stdev if stats else None,
        "corr_min": stats.min if stats else None,
        "eigenvalues": list(spectrum.eigenvalues) if spectrum else [],
        "flags": sorted(f.value for f in ml.auxiliary_flags),
    }


def _config_record(report: Report) -> dict:
    cfg = asdict(report.config)
    cfg["connectedness_threshold"] = report.connectedness_threshold
    return cfg


def emit_report(report: Report, fmt: str = "json") -> str:
    """Serialise a report as JSON (full document) or CSV (one row per month).

    The CSV columns are :data:`CSV_FIELDS`; eigenvalues and flags are joined
    with ``;``, missing values are empty cells.
    """
    months = [_month_record(ml) for ml in report.per_month]
    if fmt == "json":
        doc = {
            "config": _config_record(report),
            "months": months,
            "intervals": [{"start": str(s), "end": str(e), "label": lab.value} for s, e, lab in report.intervals],
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in months:
            rec = dict(rec)
            rec["eigenvalues"] = ";".join(repr(v) for v in rec["eigenvalues"])
            rec["flags"] = ";".join(rec["flags"])
            writer.writerow(["" if rec[k] is None else rec[k] for k in CSV_FIELDS])
        return buf.getvalue()
    raise InputError(f"unknown report format {fmt!r}")
