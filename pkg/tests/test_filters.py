import math

import numpy as np
import pytest

from feature_selection.filters import (
    equal_frequency_bins,
    filter_correlation,
    filter_mutual_information,
    filter_variance,
    mutual_information,
)
from feature_selection.ranking import abs_correlations, prescreen_pool, result_from_ranking, top_k
from tests.conftest import make_dataset


def test_top_k_breaks_ties_by_id():
    assert top_k({"b": 1.0, "a": 1.0, "c": 2.0}, 2) == ["c", "a"]


def test_result_from_ranking_scores_positions():
    r = result_from_ranking("forward", ["b", "a"], ("a", "b", "c"), 1)
    assert r.selected == ("b",)
    assert r.scores == {"a": 1.0, "b": 2.0, "c": 0.0}


def test_variance_picks_widest_columns():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 6)) * np.array([1, 10, 1, 5, 1, 1])
    r = filter_variance(make_dataset(X, rng.normal(size=50)), 2)
    assert r.selected == ("f01", "f03")
    assert r.scores["f01"] == pytest.approx(np.var(X[:, 1], ddof=1))


def test_correlation_recovers_planted(planted_linear):
    r = filter_correlation(planted_linear, 3)
    assert set(r.selected) == {"f03", "f07", "f11"}
    assert r.selected[0] == "f03"
    assert all(0.0 <= s <= 1.0 for s in r.scores.values())


def test_abs_correlations_handle_constants():
    X = np.column_stack([np.ones(5), np.arange(5.0)])
    np.testing.assert_allclose(abs_correlations(X, np.arange(5.0)), [0.0, 1.0])
    np.testing.assert_allclose(abs_correlations(X, np.ones(5)), [0.0, 0.0])


def test_equal_frequency_bins():
    np.testing.assert_array_equal(equal_frequency_bins(np.arange(10.0), 5), [0, 0, 1, 1, 2, 2, 3, 3, 4, 4])
    tied = equal_frequency_bins(np.array([1.0, 1.0, 1.0, 2.0]), 2)
    assert tied[0] == tied[1] == tied[2]


def test_mutual_information_of_a_variable_with_itself():
    bins = equal_frequency_bins(np.arange(16.0), 4)
    assert mutual_information(bins, bins, 4) == pytest.approx(math.log(4), abs=1e-12)
    shuffled = np.array([0, 1, 2, 3] * 4)
    assert mutual_information(bins, shuffled, 4) == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_filter(planted_linear):
    r = filter_mutual_information(planted_linear, 2)
    assert r.diagnostics["bins"] == math.ceil(math.sqrt(300))
    assert r.selected[0] == "f03"
    assert all(s >= 0.0 for s in r.scores.values())


def test_prescreen_pool_is_clamped_to_feature_count(planted_linear):
    pool = prescreen_pool(planted_linear, 3, 50)
    assert len(pool) == 15
    assert pool[0] == "f03"
    assert len(prescreen_pool(planted_linear, 3, 4)) == 4
