import datetime as dt
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_correlation_matrix, raw_moment_correlation, upper_triangle_stats
from plungekit.corrnet import (
    SENSITIVITY_THRESHOLDS,
    CorrelationMatrix,
    adjacency,
    corr_stats,
    correlation_matrix,
    export_graph,
)
from plungekit.errors import InputError
from plungekit.metrics import ReturnPanel
from plungekit.spectrum import eigen_spectrum
from plungekit.synth import SECTORS


def returns_panel(values, names=None):
    values = np.asarray(values, dtype=float)
    names = names or [f"E{i}" for i in range(values.shape[1])]
    dates = [dt.date(2006, 1, 2) + dt.timedelta(days=k) for k in range(values.shape[0])]
    return ReturnPanel(names, dates, values)


def constant_matrix(n, rho, names=None):
    c = np.full((n, n), rho)
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix.from_array(c, names)


def test_identical_columns():
    x = np.random.default_rng(1).normal(size=8)
    c = correlation_matrix(returns_panel(np.c_[x, x]), slice(0, 8))
    assert c.values[0, 1] == pytest.approx(1.0, abs=1e-15)


def test_negated_column():
    x = np.random.default_rng(2).normal(size=8)
    c = correlation_matrix(returns_panel(np.c_[x, -x]), slice(0, 8))
    assert c.values[0, 1] == pytest.approx(-1.0, abs=1e-15)


def test_three_by_six_matches_raw_moment_oracle():
    block = np.random.default_rng(3).normal(0, 0.01, size=(6, 3))
    c = correlation_matrix(returns_panel(block), slice(0, 6))
    np.testing.assert_allclose(c.values, raw_moment_correlation(block), rtol=0, atol=1e-12)


def test_matrix_invariants():
    block = np.random.default_rng(4).normal(size=(21, 13))
    c = correlation_matrix(returns_panel(block), slice(0, 21))
    assert np.array_equal(c.values, c.values.T)
    assert np.all(np.diag(c.values) == 1.0)
    assert np.all(np.abs(c.values) <= 1.0)
    assert not c.degenerate


def test_degenerate_entity_is_flagged_and_zeroed():
    block = np.random.default_rng(5).normal(size=(10, 3))
    block[:, 1] = 0.004
    c = correlation_matrix(returns_panel(block), slice(0, 10))
    assert c.degenerate_entities == {1}
    assert c.values[1, 0] == c.values[0, 1] == c.values[1, 2] == 0.0
    assert c.values[1, 1] == 1.0


def test_window_too_short():
    with pytest.raises(InputError, match="at least 2"):
        correlation_matrix(returns_panel(np.ones((3, 2))), slice(0, 1))


def test_constant_offdiagonal_stats():
    s = corr_stats(constant_matrix(13, 0.8))
    assert (s.mean, s.stdev, s.min, s.max) == (0.8, 0.0, 0.8, 0.8)
    assert s.ratio == 0.0


def test_ratio_undefined_for_zero_mean():
    assert corr_stats(constant_matrix(4, 0.0)).ratio is None


def test_crisis_like_mean_correlation():
    # uniform 0.85 across the 78 pairs is above the 0.80 crisis level
    s = corr_stats(constant_matrix(13, 0.85))
    assert s.mean == pytest.approx(0.85)
    assert s.mean > 0.80


def test_stats_need_two_entities():
    with pytest.raises(InputError):
        corr_stats(CorrelationMatrix.from_array([[1.0]]))


@pytest.mark.parametrize("seed", range(5))
def test_stats_match_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, size=(9, 9))
    a = (a + a.T) / 2
    np.fill_diagonal(a, 1.0)
    s = corr_stats(CorrelationMatrix.from_array(a))
    mean, stdev, lo, hi = upper_triangle_stats(a.tolist())
    assert s.mean == pytest.approx(mean, abs=1e-14)
    assert s.stdev == pytest.approx(stdev, abs=1e-14)
    assert (s.min, s.max) == (lo, hi)


def test_empty_graph():
    g = adjacency(constant_matrix(13, 0.0), 0.9)
    assert g.edge_count == 0 and g.normalized_connectedness == 0.0


@pytest.mark.parametrize("t", [0.0, 0.5, 0.9, 1.0])
def test_complete_graph(t):
    g = adjacency(constant_matrix(13, 1.0), t)
    assert g.edge_count == 78
    assert g.normalized_connectedness == 1.0


def test_direct_threshold():
    c = CorrelationMatrix.from_array([[1, 0.95, 0.85], [0.95, 1, 0.7], [0.85, 0.7, 1]])
    g = adjacency(c, 0.9)
    assert g.edges == ((0, 1),)


def test_threshold_is_inclusive():
    assert adjacency(constant_matrix(3, 0.9), 0.9).edge_count == 3


@pytest.mark.parametrize("t", [-0.1, 1.1])
def test_threshold_range(t):
    with pytest.raises(InputError):
        adjacency(constant_matrix(3, 0.5), t)


def test_dot_empty_graph():
    text = export_graph(adjacency(constant_matrix(13, 0.0, SECTORS), 0.9), "dot")
    assert text.startswith("graph {")
    assert sum(1 for line in text.splitlines() if line.strip().endswith(";") and "--" not in line) == 13
    assert "--" not in text


def test_dot_complete_graph():
    text = export_graph(adjacency(constant_matrix(13, 1.0, SECTORS), 0.9), "dot")
    assert sum(1 for line in text.splitlines() if " -- " in line) == 78
    assert '"Auto" -- "Bankex";' in text


def test_export_deterministic():
    c = CorrelationMatrix.from_array(random_correlation_matrix(np.random.default_rng(9), 13), SECTORS)
    g = adjacency(c, 0.3)
    assert export_graph(g, "dot") == export_graph(g, "dot")
    assert export_graph(g, "edge_list_json") == export_graph(g, "edge_list_json")


def test_edge_list_json_schema():
    c = CorrelationMatrix.from_array([[1, 0.95, 0.85], [0.95, 1, 0.7], [0.85, 0.7, 1]], ["A", "B", "C"])
    doc = json.loads(export_graph(adjacency(c, 0.8), "edge_list_json"))
    assert doc == {"threshold": 0.8, "nodes": ["A", "B", "C"], "edges": [["A", "B"], ["A", "C"]]}


def test_dot_quotes_names():
    c = CorrelationMatrix.from_array(np.ones((2, 2)), ['Oil "and" Gas', "IT"])
    assert r'"Oil \"and\" Gas" -- "IT";' in export_graph(adjacency(c, 0.9))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 13), st.integers(3, 40), st.integers(0, 2**32 - 1))
def test_correlation_matrix_is_psd(n, t, seed):
    block = np.random.default_rng(seed).normal(size=(t, n))
    c = correlation_matrix(returns_panel(block), slice(0, t))
    assert min(eigen_spectrum(c).eigenvalues) >= -1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 13), st.integers(0, 2**32 - 1))
def test_stats_bounds(n, seed):
    s = corr_stats(CorrelationMatrix.from_array(random_correlation_matrix(np.random.default_rng(seed), n)))
    assert s.min <= s.mean <= s.max
    assert s.stdev >= 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 13), st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_edges_nested(n, seed, t1, t2):
    t1, t2 = sorted((t1, t2))
    c = CorrelationMatrix.from_array(random_correlation_matrix(np.random.default_rng(seed), n))
    assert set(adjacency(c, t2).edges) <= set(adjacency(c, t1).edges)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 13), st.integers(0, 2**32 - 1), st.sampled_from(SENSITIVITY_THRESHOLDS))
def test_permutation_consistency(n, seed, t):
    rng = np.random.default_rng(seed)
    block = rng.normal(size=(20, n)) + rng.normal(size=(20, 1)) * 2
    names = [f"S{i}" for i in range(n)]
    perm = rng.permutation(n)
    a = correlation_matrix(returns_panel(block, names), slice(0, 20))
    b = correlation_matrix(returns_panel(block[:, perm], [names[i] for i in perm]), slice(0, 20))
    np.testing.assert_allclose(b.values, a.values[np.ix_(perm, perm)], atol=1e-14)
    assert adjacency(a, t).named_edges() == adjacency(b, t).named_edges() or np.any(
        np.isclose(a.values, t, atol=1e-14)
    )
