"""
Monte-Carlo calibration against the synthetic generator.

Run ``python -m plungekit.calibrate [path]`` to regenerate the frozen fixture
used by the test suite (default ``tests/fixtures/calibration.json``).
"""

from __future__ import annotations

import dataclasses
import json
import sys
from typing import Iterable

import numpy as np

from plungekit.indicator import IndicatorConfig, Report, label_series
from plungekit.metrics import log_returns
from plungekit.pipeline import compute_window_metrics
from plungekit.synth import Regime, SynthConfig, SynthOutput, generate, simulate_returns

CALIBRATION_SEEDS = range(10_000, 10_200)
LECM_QUANTILE = 0.99
ZERO_LOADING_SEEDS = range(100)


def run_synthetic(config: SynthConfig, indicator: IndicatorConfig = IndicatorConfig()) -> tuple[Report, SynthOutput]:
    out = generate(config)
    metrics = compute_window_metrics(log_returns(out.prices))
    return label_series(metrics, out.pe, indicator), out


def normal_regime_lecms(seeds: Iterable[int], base: SynthConfig = SynthConfig()) -> np.ndarray:
    values = []
    for seed in seeds:
        out = generate(dataclasses.replace(base, seed=seed))
        for m in compute_window_metrics(log_returns(out.prices)):
            if out.regimes[m.month] is Regime.NORMAL:
                values.append(m.lecm)
    return np.array(values)


def calibrate_lecm_min(seeds=CALIBRATION_SEEDS, quantile=LECM_QUANTILE, base: SynthConfig = SynthConfig()) -> float:
    """Upper ``quantile`` of the normal-regime LECM distribution."""
    return float(np.quantile(normal_regime_lecms(seeds, base), quantile))


def zero_loading_pass_fraction(seeds=ZERO_LOADING_SEEDS, n_entities=13, days=21, bound=0.5) -> float:
    """Share of entity pairs with |sample correlation| < ``bound`` when no factor is present."""
    passed = total = 0
    iu = np.triu_indices(n_entities, k=1)
    for seed in seeds:
        cfg = SynthConfig(n_entities=n_entities, months="N", days_per_month=days, beta_normal=0.0, seed=seed)
        corr = np.corrcoef(simulate_returns(cfg).T)[iu]
        passed += int(np.sum(np.abs(corr) < bound))
        total += corr.size
    return passed / total


def build_fixture() -> dict:
    return {
        "lecm_min": {
            "seeds": [CALIBRATION_SEEDS.start, CALIBRATION_SEEDS.stop],
            "quantile": LECM_QUANTILE,
            "value": calibrate_lecm_min(),
        },
        "zero_loading": {
            "seeds": [ZERO_LOADING_SEEDS.start, ZERO_LOADING_SEEDS.stop],
            "bound": 0.5,
            "pass_fraction": zero_loading_pass_fraction(),
        },
        "rng": "splitmix64 counter stream, top-53-bit uniforms, Box-Muller pairs",
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    path = argv[0] if argv else "tests/fixtures/calibration.json"
    with open(path, "w") as fh:
        json.dump(build_fixture(), fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
