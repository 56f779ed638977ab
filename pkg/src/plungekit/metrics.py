"""Daily log returns and per-window mean/volatility."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from plungekit.errors import InputError
from plungekit.ingest import Month, MonthWindow, PricePanel, _frozen


@dataclass(frozen=True)
class ReturnPanel:
    """Log returns; each row is dated by the later of the two trading days."""

    entities: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != (len(self.dates), len(self.entities)):
            raise InputError("return values do not match dates x entities")

    def select(self, entities) -> "ReturnPanel":
        idx = [self.entities.index(e) for e in entities]
        return ReturnPanel(tuple(entities), self.dates, self.values[:, idx])

    def without(self, entity: str) -> "ReturnPanel":
        return self.select([e for e in self.entities if e != entity])


@dataclass(frozen=True)
class WindowStats:
    month: Month
    mean_return: np.ndarray = field(repr=False)
    volatility: np.ndarray = field(repr=False)
    n_days: int


def log_returns(panel: PricePanel) -> ReturnPanel:
    if panel.n_dates < 2:
        raise InputError(f"need at least 2 dates for returns, got {panel.n_dates}")
    logp = np.log(panel.values)
    return ReturnPanel(panel.entities, panel.dates[1:], logp[1:] - logp[:-1])


def _window_block(returns: ReturnPanel, window) -> np.ndarray:
    rows = window.rows if isinstance(window, MonthWindow) else window
    if isinstance(rows, range):
        rows = slice(rows.start, rows.stop)
    block = returns.values[rows]
    if block.shape[0] == 0:
        raise InputError("empty window")
    return block


def window_stats(returns: ReturnPanel, window: MonthWindow | slice | range) -> WindowStats:
    """Per-entity mean and population volatility ``sqrt(mean((R - mu)^2))`` over a window."""
    block = _window_block(returns, window)
    mu = block.mean(axis=0)
    vol = np.sqrt(((block - mu) ** 2).mean(axis=0))
    # exact zero when a column is constant, regardless of rounding in mu
    vol[np.ptp(block, axis=0) == 0] = 0.0
    month = window.month if isinstance(window, MonthWindow) else Month.of(returns.dates[_first_row(window)])
    return WindowStats(month, _frozen(mu), _frozen(vol), block.shape[0])


def _first_row(window) -> int:
    return window.start or 0
