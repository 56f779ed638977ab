"""
Command-line front end.

    plungekit analyze --prices prices.csv [--pe pe.csv] [--threshold 0.9 ...] [--out DIR]
    plungekit synth   [--seed N] [--regimes NNCCN...] [--out DIR]
    plungekit graph   --prices prices.csv --month 2008-01 [--threshold 0.9]

Exit codes: 0 success, 1 usage or invalid configuration, 2 input data error,
3 internal numerical error. ``PLUNGEKIT_OUT`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Sequence

from plungekit.corrnet import DEFAULT_THRESHOLD, export_graph
from plungekit.errors import InputError, NumericalError, PlungeError
from plungekit.indicator import IndicatorConfig, emit_report, label_series, parameter_space
from plungekit.ingest import (
    IngestPolicy,
    Month,
    format_pe_series,
    format_price_panel,
    load_pe_series,
    load_price_panel,
)
from plungekit.metrics import log_returns
from plungekit.pipeline import compute_window_metrics
from plungekit.spectrum import spectrum_series
from plungekit.synth import SynthConfig, generate

logger = logging.getLogger("plungekit")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
OUT_ENV = "PLUNGEKIT_OUT"
DEFAULT_OUT = "plungekit-out"
FORMATS = ("json", "csv", "dot")


class UsageError(PlungeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return "" if x is None else repr(float(x)) if isinstance(x, float) else str(x)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    """Write every file to a temp name first, then rename them all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for rel, text in files.items():
            target = out_dir / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            tmp = target.with_name(f".{target.name}.tmp-{os.getpid()}")
            tmp.write_text(text, encoding="utf-8", newline="")
            staged.append((tmp, target))
    except OSError:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return data


def _pick(args, cfg: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return cfg.get(name, default)


# -- analyze / graph -------------------------------------------------------


def _run_config(args) -> dict:
    cfg = _load_config_file(args.config)
    thresholds = args.threshold if args.threshold else cfg.get("thresholds", [DEFAULT_THRESHOLD])
    thresholds = [float(t) for t in thresholds]
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise UsageError(f"threshold must lie in [0, 1], got {t}")
    include = cfg.get("include_benchmark_in_corr", True)
    if args.no_benchmark_corr:
        include = False
    formats = getattr(args, "format", None) or cfg.get("formats", ["json", "csv"])
    formats = sorted({f.strip() for item in formats for f in item.split(",") if f.strip()})
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise UsageError(f"unknown format(s): {', '.join(sorted(unknown))}")
    try:
        policy = IngestPolicy(
            missing_cell_action=_pick(args, cfg, "missing_cell_action", "drop_date"),
            min_days_per_month=int(_pick(args, cfg, "min_days_per_month", 15)),
            benchmark_name=_pick(args, cfg, "benchmark", None),
        )
        defaults = IndicatorConfig()
        indicator = IndicatorConfig(
            pe_min=float(_pick(args, cfg, "pe_min", defaults.pe_min)),
            lecm_min=float(_pick(args, cfg, "lecm_min", defaults.lecm_min)),
            mean_corr_min=cfg.get("mean_corr_min", defaults.mean_corr_min),
            min_corr_min=cfg.get("min_corr_min", defaults.min_corr_min),
            stdev_max=cfg.get("stdev_max", defaults.stdev_max),
            persistence_months=int(_pick(args, cfg, "persistence_months", defaults.persistence_months)),
        )
    except (InputError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    prices = _pick(args, cfg, "prices")
    if not prices:
        raise UsageError("--prices is required")
    out = _pick(args, cfg, "out") or os.environ.get(OUT_ENV) or DEFAULT_OUT
    return {
        "prices": prices,
        "pe": _pick(args, cfg, "pe"),
        "thresholds": thresholds,
        "include_benchmark": include,
        "policy": policy,
        "indicator": indicator,
        "out": Path(out),
        "formats": formats,
    }


def _analyze_metrics(rc: dict):
    panel = load_price_panel(rc["prices"], rc["policy"])
    returns = log_returns(panel)
    metrics = compute_window_metrics(returns, rc["policy"], rc["thresholds"], rc["include_benchmark"])
    return returns, metrics


def build_artifacts(rc: dict) -> dict[str, str]:
    """All analyze outputs as ``{relative path: text}``, computed before any write."""
    returns, metrics = _analyze_metrics(rc)
    if not metrics:
        raise InputError("no month has enough trading days for analysis")
    pe = None
    if rc["pe"]:
        pe = load_pe_series(rc["pe"])
    else:
        logger.warning("no PE series given; months can only be labelled Normal or Crisis")
    report = label_series(metrics, pe, rc["indicator"])

    files: dict[str, str] = {}
    files["metrics.csv"] = _csv(
        ["month", "n_days", "degenerate", "lecm", "second", "third", "corr_mean", "corr_stdev",
         "corr_ratio", "corr_min", "corr_max", "sweeps"],
        [
            [str(m.month), m.n_days, int(m.degenerate), m.spectrum.lecm, m.spectrum.second, m.spectrum.third,
             m.corr_stats.mean, m.corr_stats.stdev, m.corr_stats.ratio, m.corr_stats.min, m.corr_stats.max,
             m.spectrum.iterations]
            for m in metrics
        ],
    )  # fmt: skip
    files["volatility.csv"] = _csv(
        ["month", *returns.entities],
        [[str(m.month), *(float(v) for v in m.stats.volatility)] for m in metrics],
    )
    files["connectedness.csv"] = _csv(
        ["month", "threshold", "edges", "normalized"],
        [[str(m.month), g.threshold, g.edge_count, g.normalized_connectedness] for m in metrics for g in m.graphs],
    )
    files["eigenvalues.csv"] = _csv(
        ["month", "lecm", "second", "third", "flagged"],
        [[str(r.month), r.lecm, r.second, r.third, int(r.flagged)] for r in spectrum_series(metrics)],
    )
    files["parameter_space.csv"] = _csv(
        ["month", "lecm", "pe", "label"],
        [[str(p.month), p.lecm, p.pe, p.label.value] for p in parameter_space(report)],
    )
    if "json" in rc["formats"]:
        files["report.json"] = emit_report(report, "json")
    if "csv" in rc["formats"]:
        files["report.csv"] = emit_report(report, "csv")
    if "dot" in rc["formats"]:
        for m in metrics:
            for g in m.graphs:
                files[f"graphs/{m.month}_t{g.threshold:.2f}.dot"] = export_graph(g, "dot")
    return files


def cmd_analyze(args) -> int:
    rc = _run_config(args)
    files = build_artifacts(rc)
    write_outputs(rc["out"], files)
    logger.info("wrote %d file(s) to %s", len(files), rc["out"])
    return EXIT_OK


def cmd_graph(args) -> int:
    if args.threshold and len(args.threshold) > 1:
        raise UsageError("graph takes a single --threshold")
    rc = _run_config(args)
    try:
        month = Month.parse(args.month)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    _, metrics = _analyze_metrics(rc)
    for m in metrics:
        if m.month == month:
            sys.stdout.write(export_graph(m.graph(rc["thresholds"][0]), "dot"))
            return EXIT_OK
    raise InputError(f"month {month} not present (or too few trading days) in {rc['prices']}")


# -- synth -----------------------------------------------------------------


def _synth_config(args) -> SynthConfig:
    cfg = _load_config_file(args.config)
    known = {f.name for f in fields(SynthConfig)}
    extra = set(cfg) - known - {"out"}
    if extra:
        raise UsageError(f"unknown synth config key(s): {', '.join(sorted(extra))}")
    values = {k: v for k, v in cfg.items() if k in known}
    if "start" in values and isinstance(values["start"], str):
        values["start"] = Month.parse(values["start"])
    for flag, key in (("seed", "seed"), ("regimes", "months"), ("days_per_month", "days_per_month"),
                      ("n_entities", "n_entities")):  # fmt: skip
        v = getattr(args, flag)
        if v is not None:
            values[key] = v
    try:
        return SynthConfig(**values)
    except (InputError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid synth config: {exc}") from exc


def synth_artifacts(config: SynthConfig) -> dict[str, str]:
    out = generate(config)
    record = asdict(config)
    record["months"] = [r.value for r in config.months]
    record["start"] = str(config.start)
    truth = {
        "config": record,
        "months": [{"month": str(m), "regime": r.value} for m, r in out.regimes.items()],
    }
    return {
        "prices.csv": format_price_panel(out.prices),
        "pe.csv": format_pe_series(out.pe),
        "regimes.json": json.dumps(truth, indent=2) + "\n",
    }


def cmd_synth(args) -> int:
    config = _synth_config(args)
    cfg = _load_config_file(args.config)
    out = Path(args.out or cfg.get("out") or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    write_outputs(out, synth_artifacts(config))
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prices", help="wide price CSV (date,<entity>,...)")
    p.add_argument("--threshold", type=float, action="append", help="adjacency threshold t (repeatable)")
    p.add_argument("--no-benchmark-corr", action="store_true", help="leave the benchmark out of correlations")
    p.add_argument("--benchmark", help="name of the benchmark column")
    p.add_argument("--min-days", dest="min_days_per_month", type=int, help="minimum trading days per month")
    p.add_argument("--missing", dest="missing_cell_action", choices=["drop_date", "fail"])
    p.add_argument("--config", help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plungekit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="monthly correlation, spectrum and crash labels")
    _add_run_flags(a)
    a.add_argument("--pe", help="monthly PE CSV (month,pe); pre-aggregate daily PE to monthly means")
    a.add_argument("--pe-min", type=float)
    a.add_argument("--lecm-min", type=float)
    a.add_argument("--persistence", dest="persistence_months", type=int)
    a.add_argument("--out", help=f"output directory (default ${OUT_ENV} or {DEFAULT_OUT})")
    a.add_argument("--format", action="append", help="json, csv, dot (repeatable or comma separated)")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synth", help="write a synthetic two-regime panel")
    s.add_argument("--seed", type=int)
    s.add_argument("--regimes", help="one letter per month: N normal, C crisis")
    s.add_argument("--days-per-month", type=int)
    s.add_argument("--n-entities", type=int)
    s.add_argument("--out")
    s.add_argument("--config")
    s.set_defaults(func=cmd_synth)

    g = sub.add_parser("graph", help="DOT graph of one month's adjacency on stdout")
    _add_run_flags(g)
    g.add_argument("--month", required=True, help="YYYY-MM")
    g.set_defaults(func=cmd_graph)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="plungekit: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"plungekit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"plungekit: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"plungekit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
