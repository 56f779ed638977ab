"""Monthly correlation structure and PE-ratio crash signatures for sector index panels."""

from plungekit.errors import InputError, NumericalError, PlungeError
from plungekit.ingest import IngestPolicy, Month, PESeries, PricePanel, load_pe_series, load_price_panel, month_windows
from plungekit.metrics import ReturnPanel, WindowStats, log_returns, window_stats
from plungekit.corrnet import AdjacencyGraph, CorrelationMatrix, CorrStats, adjacency, corr_stats, correlation_matrix, export_graph
from plungekit.spectrum import SpectrumResult, eigen_spectrum, spectrum_series
from plungekit.indicator import IndicatorConfig, Label, MonthLabel, Report, classify_month, emit_report, label_series, parameter_space
from plungekit.pipeline import WindowMetrics, compute_window_metrics

__version__ = "0.1.0"

__all__ = [
    "AdjacencyGraph",
    "CorrStats",
    "CorrelationMatrix",
    "IndicatorConfig",
    "IngestPolicy",
    "InputError",
    "Label",
    "Month",
    "MonthLabel",
    "NumericalError",
    "PESeries",
    "PlungeError",
    "PricePanel",
    "Report",
    "ReturnPanel",
    "SpectrumResult",
    "WindowMetrics",
    "WindowStats",
    "adjacency",
    "classify_month",
    "compute_window_metrics",
    "corr_stats",
    "correlation_matrix",
    "eigen_spectrum",
    "emit_report",
    "export_graph",
    "label_series",
    "load_pe_series",
    "load_price_panel",
    "log_returns",
    "month_windows",
    "parameter_space",
    "spectrum_series",
    "window_stats",
]
