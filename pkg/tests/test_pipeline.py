import numpy as np
import pytest

from plungekit.errors import InputError
from plungekit.ingest import IngestPolicy
from plungekit.metrics import log_returns
from plungekit.pipeline import compute_window_metrics
from plungekit.synth import BENCHMARK, SynthConfig, generate


@pytest.fixture(scope="module")
def returns():
    return log_returns(generate(SynthConfig(months="NCN", seed=5)).prices)


def test_one_bundle_per_month(returns):
    ms = compute_window_metrics(returns, thresholds=(0.9, 0.8))
    assert [str(m.month) for m in ms] == ["2006-01", "2006-02", "2006-03"]
    for m in ms:
        assert m.n_days == 21
        assert [g.threshold for g in m.graphs] == [0.9, 0.8]
        assert m.corr.n == 13
        assert sum(m.spectrum.eigenvalues) == pytest.approx(13, abs=1e-9)
        assert m.stats.volatility.shape == (13,)


def test_benchmark_can_be_excluded(returns):
    policy = IngestPolicy(benchmark_name=BENCHMARK)
    ms = compute_window_metrics(returns, policy, include_benchmark=False)
    assert ms[0].corr.n == 12 and BENCHMARK not in ms[0].corr.entities
    assert ms[0].stats.volatility.shape == (13,)


def test_short_months_skipped(returns):
    ms = compute_window_metrics(returns, IngestPolicy(min_days_per_month=22))
    assert ms == []


def test_batched_spectrum_matches_single(returns):
    from plungekit.spectrum import eigen_spectrum

    for m in compute_window_metrics(returns):
        np.testing.assert_allclose(m.spectrum.eigenvalues, eigen_spectrum(m.corr).eigenvalues, atol=1e-12)


def test_bad_threshold(returns):
    with pytest.raises(InputError):
        compute_window_metrics(returns, thresholds=(1.5,))


def test_graph_lookup(returns):
    m = compute_window_metrics(returns)[1]
    assert m.graph(0.9) is m.graphs[0]
    assert m.graph(0.5).edge_count >= m.graph(0.9).edge_count
