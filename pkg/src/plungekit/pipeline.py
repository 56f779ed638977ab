"""Per-month bundle of returns statistics, correlation structure and spectrum."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from plungekit.corrnet import (
    DEFAULT_THRESHOLD,
    AdjacencyGraph,
    CorrelationMatrix,
    CorrStats,
    adjacency,
    corr_stats,
    correlation_matrix,
)
from plungekit.errors import InputError
from plungekit.ingest import IngestPolicy, Month, month_windows
from plungekit.metrics import ReturnPanel, WindowStats, window_stats
from plungekit.spectrum import SpectrumResult, jacobi_eigenvalues

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowMetrics:
    month: Month
    n_days: int
    stats: WindowStats
    corr: CorrelationMatrix
    corr_stats: CorrStats
    spectrum: SpectrumResult
    graphs: tuple[AdjacencyGraph, ...]

    @property
    def degenerate(self) -> bool:
        return self.corr.degenerate

    @property
    def lecm(self) -> float:
        return self.spectrum.lecm

    def graph(self, t: float) -> AdjacencyGraph:
        for g in self.graphs:
            if g.threshold == t:
                return g
        return adjacency(self.corr, t)


def compute_window_metrics(
    returns: ReturnPanel,
    policy: IngestPolicy = IngestPolicy(),
    thresholds: Sequence[float] = (DEFAULT_THRESHOLD,),
    include_benchmark: bool = True,
) -> list[WindowMetrics]:
    """Metrics for every valid calendar month of ``returns``, chronologically.

    Volatilities always cover every entity; when ``include_benchmark`` is false
    the benchmark named in ``policy`` is left out of the correlation matrix.
    """
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise InputError(f"threshold must lie in [0, 1], got {t}")
    corr_panel = returns
    if not include_benchmark and policy.benchmark_name is not None:
        if policy.benchmark_name in returns.entities:
            corr_panel = returns.without(policy.benchmark_name)
    if len(corr_panel.entities) < 2:
        raise InputError("need at least 2 entities for correlation analysis")

    windows = [w for w in month_windows(returns, policy) if w.valid]
    skipped = len(month_windows(returns, policy)) - len(windows)
    if skipped:
        logger.info("skipping %d month(s) with fewer than %d trading days", skipped, policy.min_days_per_month)
    if not windows:
        return []

    corrs = [correlation_matrix(corr_panel, w) for w in windows]
    eig, sweeps = jacobi_eigenvalues(np.stack([c.values for c in corrs]))
    out = []
    for w, c, e, k in zip(windows, corrs, eig, sweeps):
        out.append(
            WindowMetrics(
                month=w.month,
                n_days=w.n_days,
                stats=window_stats(returns, w),
                corr=c,
                corr_stats=corr_stats(c),
                spectrum=SpectrumResult(tuple(e.tolist()), int(k)),
                graphs=tuple(adjacency(c, t) for t in thresholds),
            )
        )
    return out
