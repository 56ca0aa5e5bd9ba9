import math

import numpy as np
import pytest
from pydantic import ValidationError

from benchmark.schemas import MethodTrajectory, SensitivityReport, ShrinkSchedule, TrajectoryPoint
from benchmark.sensitivity import (
    cell_seed,
    rank_methods,
    rebuild_statistics,
    run_benchmark,
    run_cell,
    shrink,
    summarize_trajectory,
    trend_stats,
)
from feature_selection.schemas import DEFAULT_METHODS, ForestParams, SaParams, SelectorSpec
from regression.cross_validation import kfold_cv
from feature_selection.selector import select
from utils.errors import ShrinkError
from tests.conftest import make_dataset


def ramp_dataset(n):
    rng = np.random.default_rng(n)
    X = rng.normal(size=(n, 3))
    return make_dataset(X, X[:, 0] + rng.normal(size=n))


def test_schedules():
    assert len(ShrinkSchedule.full().fractions) == 81
    assert ShrinkSchedule.full().fractions[-1] == 0.2
    desk = ShrinkSchedule.desk()
    assert len(desk.fractions) == 17
    assert desk.fractions[:3] == (1.0, 0.95, 0.9)
    with pytest.raises(ValidationError):
        ShrinkSchedule(fractions=(0.9, 0.5))
    with pytest.raises(ValidationError):
        ShrinkSchedule(fractions=(1.0, 0.1))
    with pytest.raises(ValidationError):
        ShrinkSchedule(fractions=(1.0, 0.5, 0.5))


def test_shrink_keeps_most_recent_rows():
    ds = ramp_dataset(100)
    assert shrink(ds, 1.0) is ds
    tail = shrink(ds, 0.2)
    assert tail.n_rows == 20
    assert tail.features.dates == ds.features.dates[-20:]
    np.testing.assert_array_equal(tail.y, ds.y[-20:])


def test_shrink_rounds_up():
    assert shrink(ramp_dataset(333), 0.31).n_rows == 104


def test_shrink_policies():
    ds = ramp_dataset(100)
    head = shrink(ds, 0.5, "prefix")
    assert head.features.dates == ds.features.dates[:50]
    sample = shrink(ds, 0.5, "random", seed=3)
    assert sample.n_rows == 50
    assert list(sample.features.dates) == sorted(sample.features.dates)
    assert shrink(ds, 0.5, "random", seed=3).features.dates == sample.features.dates


def test_shrink_refuses_too_few_rows():
    with pytest.raises(ShrinkError):
        shrink(ramp_dataset(50), 0.3)
    with pytest.raises(ValueError):
        shrink(ramp_dataset(50), 0.0)


def test_trend_stats_constant_and_exact_line():
    fractions = [1.0 - 0.05 * i for i in range(17)]
    assert trend_stats([(f, 0.9) for f in fractions]) == (0.0, 0.9, 0.0)
    slope, intercept, fluct = trend_stats([(f, 0.5 + 0.4 * f) for f in fractions])
    assert slope == pytest.approx(0.4, abs=1e-12)
    assert intercept == pytest.approx(0.5, abs=1e-12)
    assert fluct == pytest.approx(0.0, abs=1e-12)


def test_trend_stats_matches_closed_form():
    rng = np.random.default_rng(8)
    f = np.linspace(1.0, 0.2, 81)
    r2 = 0.7 + 0.1 * f + 0.02 * rng.normal(size=81)
    slope, intercept, fluct = trend_stats(list(zip(f, r2)))
    n = len(f)
    b = (n * np.sum(f * r2) - f.sum() * r2.sum()) / (n * np.sum(f ** 2) - f.sum() ** 2)
    a = (r2.sum() - b * f.sum()) / n
    assert slope == pytest.approx(b, abs=1e-10)
    assert intercept == pytest.approx(a, abs=1e-10)
    assert fluct == pytest.approx(np.std(r2 - (a + b * f), ddof=1), abs=1e-10)


def test_trend_stats_needs_three_points():
    with pytest.raises(ValueError):
        trend_stats([(1.0, 0.5), (0.9, 0.4)])


def fake_trajectory(method_id, values, fractions=(1.0, 0.9, 0.8, 0.7)):
    points = tuple(TrajectoryPoint(fraction=f, n_rows=100, mean_r2=v, fold_std=0.01) for f, v in zip(fractions, values))
    return summarize_trajectory(method_id, points)


def fake_report(order=None):
    trajectories = [
        fake_trajectory("var", [0.90, 0.90, 0.90, 0.90]),
        fake_trajectory("cor", [0.95, 0.93, 0.92, 0.88]),
        fake_trajectory("dtw", [0.80, 0.85, 0.78, 0.86]),
        fake_trajectory("lasso", [0.95, 0.90, 0.96, 0.91]),
    ]
    if order:
        trajectories = [trajectories[i] for i in order]
    return rank_methods(SensitivityReport(trajectories=tuple(trajectories)))


def test_rank_methods():
    report = fake_report()
    assert report.rank_by_mean_r2 == ("lasso", "cor", "var", "dtw")
    assert report.rank_by_abs_slope[0] == "var"
    assert report.rank_by_fluctuation[0] == "var"
    for m in ("var", "cor", "dtw", "lasso"):
        expected = sum(report.rank_of(m, r) for r in ("rank_by_mean_r2", "rank_by_abs_slope", "rank_by_fluctuation"))
        assert report.composite_scores[m] == expected
    scores = [report.composite_scores[m] for m in report.composite_rank]
    assert scores == sorted(scores)


def test_rank_methods_ignores_input_order():
    a, b = fake_report(), fake_report(order=[3, 1, 0, 2])
    for name in ("rank_by_mean_r2", "rank_by_abs_slope", "rank_by_fluctuation", "composite_rank"):
        assert getattr(a, name) == getattr(b, name)


def test_families_summarize_members():
    families = {f.family: f for f in fake_report().families}
    assert families["filter"].methods == ("var", "cor")
    assert families["filter"].mean_r2 == pytest.approx((0.90 + 0.92) / 2)
    assert set(families) == {"filter", "embedded", "similarity"}


def test_report_rejects_bad_rankings():
    t = fake_trajectory("var", [0.9, 0.9, 0.9])
    with pytest.raises(ValidationError):
        SensitivityReport(trajectories=(t,), rank_by_mean_r2=("cor",))


def test_rebuild_statistics_reproduces_the_report():
    report = fake_report()
    stripped = SensitivityReport(config={"k": 3}, trajectories=tuple(
        MethodTrajectory(method_id=t.method_id, family=t.family, points=t.points) for t in report.trajectories
    ))
    rebuilt = rebuild_statistics(stripped)
    assert rebuilt.trajectories == report.trajectories
    assert rebuilt.composite_rank == report.composite_rank


def test_single_fraction_reduces_to_one_cv_score(planted_linear):
    s = SelectorSpec(method_id="cor", k=3)
    report = run_benchmark(planted_linear, [s], ShrinkSchedule(fractions=(1.0,)), seed=4, n_jobs=1)
    t = report.trajectory("cor")
    assert len(t.points) == 1 and t.slope is None
    expected = kfold_cv(planted_linear, select(planted_linear, s).selected, 10, cell_seed(4, "cor", 1.0))
    assert t.mean_r2_overall == expected.mean_r2
    assert t.points[0].fold_std == expected.std_r2


def test_exact_linear_target_scores_one_everywhere(exact_linear):
    specs = [
        SelectorSpec(method_id=m, k=4, forest_params=ForestParams(trees=5), sa_params=SaParams(iters=10))
        for m in DEFAULT_METHODS
    ]
    report = run_benchmark(exact_linear, specs, ShrinkSchedule.desk(), seed=0, n_jobs=1)
    assert len(report.trajectories) == 15
    for t in report.trajectories:
        assert len(t.points) == 17
        assert t.error_cells == 0
        assert all(p.mean_r2 == pytest.approx(1.0, abs=1e-6) for p in t.points)
        assert t.slope == pytest.approx(0.0, abs=1e-6)
        assert math.isfinite(t.fluctuation)


def test_benchmark_is_deterministic(planted_linear):
    specs = [SelectorSpec(method_id=m, k=3, sa_params=SaParams(iters=15)) for m in ("var", "simulated", "dtw")]
    schedule = ShrinkSchedule.stepped(0.2, 0.2, "random")
    a = run_benchmark(planted_linear, specs, schedule, seed=1, n_jobs=1)
    b = run_benchmark(planted_linear, specs, schedule, seed=1, n_jobs=1)
    assert a.model_dump_json() == b.model_dump_json()


def test_worker_count_does_not_change_results(planted_linear):
    specs = [SelectorSpec(method_id=m, k=3, sa_params=SaParams(iters=15)) for m in ("cor", "simulated", "eu")]
    schedule = ShrinkSchedule.stepped(0.2, 0.2, "random")
    serial = run_benchmark(planted_linear, specs, schedule, seed=2, n_jobs=1)
    parallel = run_benchmark(planted_linear, specs, schedule, seed=2, n_jobs=3)
    assert parallel.model_dump_json() == serial.model_dump_json()


def test_failed_cells_are_recorded(planted_linear):
    specs = [SelectorSpec(method_id="var", k=3), SelectorSpec(method_id="cor", k=16)]
    report = run_benchmark(planted_linear, specs, ShrinkSchedule.stepped(0.2), seed=0, n_jobs=1)
    broken = report.trajectory("cor")
    assert broken.error_cells == len(broken.points) == 5
    assert all(p.mean_r2 is None and "SelectionError" in p.error for p in broken.points)
    assert broken.mean_r2_overall is None
    assert report.rank_by_mean_r2 == ("var", "cor")


def test_run_cell_never_raises(planted_linear):
    point = run_cell(planted_linear, SelectorSpec(method_id="var", k=3), 0.01, seed=0)
    assert point.mean_r2 is None
    assert "ShrinkError" in point.error


def test_benchmark_rejects_datasets_too_small_for_the_schedule():
    with pytest.raises(ShrinkError):
        run_benchmark(ramp_dataset(60), [SelectorSpec(method_id="var", k=2)], ShrinkSchedule.desk(), seed=0)
