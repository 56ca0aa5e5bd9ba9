from datetime import date, timedelta

import numpy as np
import pytest
from pydantic import ValidationError

from dataset.alignment import align, build_horizon_target, normalize, normalize_columns
from dataset.schemas import FeatureMatrix, NormalizationMode, TimeSeries
from utils.errors import AlignmentError, HorizonError


def days(start: date, n: int, step: int = 1) -> tuple[date, ...]:
    return tuple(start + timedelta(days=step * i) for i in range(n))


D0 = date(2021, 3, 1)


def test_time_series_rejects_non_finite_and_unordered():
    with pytest.raises(ValidationError):
        TimeSeries(id="A.Close", dates=days(D0, 3), values=[1.0, np.nan, 2.0])
    with pytest.raises(ValidationError):
        TimeSeries(id="A.Close", dates=(D0, D0), values=[1.0, 2.0])
    with pytest.raises(ValidationError):
        TimeSeries(id="A.Close", dates=(D0,), values=[1.0])


def test_time_series_values_are_read_only():
    s = TimeSeries(id="A.Close", dates=days(D0, 3), values=[1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_feature_matrix_requires_unique_ids():
    with pytest.raises(ValidationError):
        FeatureMatrix(column_ids=("a", "a"), dates=days(D0, 2), values=np.zeros((2, 2)))


def test_align_keeps_common_dates_in_order():
    a = TimeSeries(id="A", dates=days(D0, 5), values=[1, 2, 3, 4, 5])
    b = TimeSeries(id="B", dates=days(D0 + timedelta(days=2), 5), values=[10, 20, 30, 40, 50])
    m = align([a, b])
    assert m.column_ids == ("A", "B")
    assert m.dates == days(D0 + timedelta(days=2), 3)
    np.testing.assert_array_equal(m.values, [[3, 10], [4, 20], [5, 30]])


def test_align_with_no_common_date_names_the_worst_pair():
    a = TimeSeries(id="A", dates=days(D0, 3), values=[1, 2, 3])
    b = TimeSeries(id="B", dates=days(D0 + timedelta(days=30), 3), values=[1, 2, 3])
    c = TimeSeries(id="C", dates=days(D0, 40), values=np.arange(40.0))
    with pytest.raises(AlignmentError, match="'A' and 'B'"):
        align([a, b, c])


def test_align_with_a_single_common_date_is_an_alignment_error():
    a = TimeSeries(id="A", dates=days(D0, 3), values=[1, 2, 3])
    b = TimeSeries(id="B", dates=days(D0 + timedelta(days=2), 3), values=[4, 5, 6])
    c = TimeSeries(id="C", dates=days(D0, 10), values=np.arange(10.0))
    with pytest.raises(AlignmentError, match="'A' and 'B'"):
        align([a, b, c])


def test_align_is_idempotent():
    rng = np.random.default_rng(3)
    series = []
    for j in range(6):
        keep = np.sort(rng.choice(40, size=34, replace=False))
        all_days = days(D0, 40)
        series.append(TimeSeries(id=f"S{j}", dates=tuple(all_days[i] for i in keep), values=rng.normal(size=34)))
    m = align(series)
    again = align([TimeSeries(id=fid, dates=m.dates, values=m.column(fid)) for fid in m.column_ids])
    assert again.column_ids == m.column_ids
    assert again.dates == m.dates
    np.testing.assert_array_equal(again.values, m.values)


def test_horizon_target_shifts_by_horizon():
    m = FeatureMatrix(
        column_ids=("AAPL.Close", "X"),
        dates=days(D0, 15),
        values=np.column_stack([np.arange(15.0), np.arange(15.0) * 2]),
    )
    ds = build_horizon_target(m, "AAPL.Close", horizon=10)
    assert ds.n_rows == 5
    np.testing.assert_array_equal(ds.y, np.arange(10.0, 15.0))
    for t in range(ds.n_rows):
        assert ds.y[t] == m.column("AAPL.Close")[t + 10]
    assert ds.features.dates == m.dates[:5]
    assert "AAPL.Close" in ds.column_ids


def test_horizon_zero_is_contemporaneous():
    m = FeatureMatrix(column_ids=("T",), dates=days(D0, 4), values=np.arange(4.0)[:, None])
    ds = build_horizon_target(m, "T", horizon=0)
    np.testing.assert_array_equal(ds.y, ds.target_series)


@pytest.mark.parametrize("target,horizon", [("missing", 1), ("T", 9), ("T", -1)])
def test_horizon_errors(target, horizon):
    m = FeatureMatrix(column_ids=("T",), dates=days(D0, 10), values=np.arange(10.0)[:, None])
    with pytest.raises(HorizonError):
        build_horizon_target(m, target, horizon)


def test_zscore_uses_sample_std():
    z = normalize([1.0, 2.0, 3.0])
    np.testing.assert_allclose(z, [-1.0, 0.0, 1.0])
    assert np.std(z, ddof=1) == pytest.approx(1.0)


def test_zscore_is_idempotent():
    rng = np.random.default_rng(8)
    for n in (2, 3, 17, 250):
        for _ in range(20):
            x = rng.normal(size=n) * rng.uniform(0.1, 1e3) + rng.uniform(-1e3, 1e3)
            z = normalize(x)
            np.testing.assert_allclose(normalize(z), z, atol=1e-9)


def test_constant_column_normalizes_to_zeros():
    assert np.all(normalize([4.0, 4.0, 4.0]) == 0.0)
    X = np.column_stack([np.full(5, 7.0), np.arange(5.0)])
    Z = normalize_columns(X)
    assert np.all(Z[:, 0] == 0.0)
    assert Z[:, 1].mean() == pytest.approx(0.0, abs=1e-12)


def test_none_mode_is_identity_copy():
    x = np.array([3.0, 1.0, 2.0])
    out = normalize(x, NormalizationMode.none)
    np.testing.assert_array_equal(out, x)
    assert out is not x


def test_take_rows_keeps_alignment(exact_linear):
    rows = np.arange(150, 200)
    sub = exact_linear.take_rows(rows)
    assert sub.features.dates == exact_linear.features.dates[150:]
    np.testing.assert_array_equal(sub.y, exact_linear.y[150:])
