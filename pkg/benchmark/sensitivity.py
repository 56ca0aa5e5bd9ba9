"""
Sample-size sensitivity benchmark.

For every retained fraction and every method: shrink the dataset, re-run the
selector on the shrunk rows, and score OLS on the selected features with
10-fold CV. Each cell derives its own seeds up front, so cells can run in
any order or in parallel and still reproduce the same report.
"""
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from benchmark.schemas import (
    FamilySummary,
    MethodTrajectory,
    SensitivityReport,
    ShrinkPolicy,
    ShrinkSchedule,
    TrajectoryPoint,
)
from dataset.schemas import AlignedDataset
from feature_selection.schemas import FAMILIES, SelectorSpec, method_family
from feature_selection.selector import select
from regression.cross_validation import kfold_cv, make_rng
from utils.errors import ShrinkError
from utils.file_ops import derive_seed

logger = logging.getLogger(__name__)

CV_FOLDS = 10


def shrink(ds: AlignedDataset, fraction: float, policy: ShrinkPolicy = "suffix", seed: int = 0, folds: int = CV_FOLDS) -> AlignedDataset:
    """
    Keeps ceil(fraction * N) rows: the most recent ones (suffix), the oldest
    ones (prefix) or a seeded random subset kept in date order (random).
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = ds.n_rows
    keep = math.ceil(round(fraction * n, 9))
    if keep < 2 * folds:
        raise ShrinkError(f"fraction {fraction} keeps {keep} of {n} rows; {folds}-fold CV needs at least {2 * folds}")
    if keep == n:
        return ds
    if policy == "suffix":
        rows = np.arange(n - keep, n)
    elif policy == "prefix":
        rows = np.arange(keep)
    elif policy == "random":
        rng = make_rng(derive_seed(seed, "shrink", f"{fraction:.4f}"))
        rows = np.sort(rng.choice(n, size=keep, replace=False))
    else:
        raise ValueError(f"Unknown shrink policy {policy!r}")
    return ds.take_rows(rows)


def cell_seed(seed: int, method_id: str, fraction: float) -> int:
    return derive_seed(seed, method_id, f"{fraction:.4f}")


def run_cell(
    ds: AlignedDataset,
    spec: SelectorSpec,
    fraction: float,
    seed: int,
    policy: ShrinkPolicy = "suffix",
    folds: int = CV_FOLDS,
) -> TrajectoryPoint:
    """One (method, fraction) cell; failures become an error point instead of raising."""
    try:
        shrunk = shrink(ds, fraction, policy, seed, folds)
        result = select(shrunk, spec)
        score = kfold_cv(shrunk, result.selected, folds, cell_seed(seed, spec.method_id, fraction))
    except Exception as e:
        logger.warning(f"Cell {spec.method_id}@{fraction:.2f} failed: {type(e).__name__}: {e}")
        return TrajectoryPoint(fraction=fraction, error=f"{type(e).__name__}: {e}")
    return TrajectoryPoint(
        fraction=fraction,
        n_rows=shrunk.n_rows,
        mean_r2=score.mean_r2,
        fold_std=score.std_r2,
        selected=result.selected,
    )


def trend_stats(points: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares line of r2 on fraction, and the sample std of its residuals."""
    if len(points) < 3:
        raise ValueError(f"trend_stats needs at least 3 points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=np.float64)
    y = np.array([p[1] for p in points], dtype=np.float64)
    if np.ptp(x) == 0:
        raise ValueError("trend_stats needs at least two distinct fractions")
    if np.ptp(y) == 0:
        return 0.0, float(y[0]), 0.0
    xc = x - x.mean()
    slope = float(np.sum(xc * (y - y.mean())) / np.sum(xc ** 2))
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    return slope, intercept, float(np.std(residuals, ddof=1))


def summarize_trajectory(method_id: str, points: tuple[TrajectoryPoint, ...]) -> MethodTrajectory:
    """Builds a trajectory and its statistics from raw cell points."""
    valid = [(p.fraction, p.mean_r2) for p in points if p.mean_r2 is not None]
    stds = [p.fold_std for p in points if p.fold_std is not None]
    slope = intercept = fluctuation = None
    if len(valid) >= 3 and len({f for f, _ in valid}) > 1:
        slope, intercept, fluctuation = trend_stats(valid)
    return MethodTrajectory(
        method_id=method_id,
        family=method_family(method_id),
        points=points,
        slope=slope,
        intercept=intercept,
        fluctuation=fluctuation,
        mean_r2_overall=math.fsum(r for _, r in valid) / len(valid) if valid else None,
        mean_fold_std=math.fsum(stds) / len(stds) if stds else None,
        error_cells=sum(1 for p in points if p.error is not None),
    )


def _order(methods: list[str], key) -> tuple[str, ...]:
    """Sort by key (None last), ties by method id."""
    return tuple(sorted(methods, key=lambda m: (key(m) is None, key(m) if key(m) is not None else 0.0, m)))


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else None


def rank_methods(report: SensitivityReport) -> SensitivityReport:
    """Fills the three rankings, the composite, and the family summaries."""
    by_id = {t.method_id: t for t in report.trajectories}
    methods = list(by_id)

    by_r2 = _order(methods, lambda m: None if by_id[m].mean_r2_overall is None else -by_id[m].mean_r2_overall)
    by_slope = _order(methods, lambda m: None if by_id[m].slope is None else abs(by_id[m].slope))
    by_fluct = _order(methods, lambda m: by_id[m].fluctuation)

    composite_scores = {
        m: by_r2.index(m) + by_slope.index(m) + by_fluct.index(m) + 3 for m in methods
    }
    composite = tuple(sorted(methods, key=lambda m: (composite_scores[m], m)))

    families = []
    for family, members in FAMILIES.items():
        present = tuple(m for m in members if m in by_id)
        if not present:
            continue
        families.append(FamilySummary(
            family=family,
            methods=present,
            mean_r2=_mean(by_id[m].mean_r2_overall for m in present),
            mean_abs_slope=_mean(None if by_id[m].slope is None else abs(by_id[m].slope) for m in present),
            mean_fluctuation=_mean(by_id[m].fluctuation for m in present),
        ))

    return report.model_copy(update={
        "rank_by_mean_r2": by_r2,
        "rank_by_abs_slope": by_slope,
        "rank_by_fluctuation": by_fluct,
        "composite_rank": composite,
        "composite_scores": {m: composite_scores[m] for m in composite},
        "families": tuple(families),
    })


def rebuild_statistics(report: SensitivityReport) -> SensitivityReport:
    """Recomputes every derived field from the raw trajectory points."""
    trajectories = tuple(summarize_trajectory(t.method_id, t.points) for t in report.trajectories)
    return rank_methods(SensitivityReport(config=report.config, trajectories=trajectories))


def run_benchmark(
    ds: AlignedDataset,
    methods: list[SelectorSpec],
    schedule: ShrinkSchedule,
    seed: int,
    n_jobs: int = 1,
    folds: int = CV_FOLDS,
    config: dict | None = None,
) -> SensitivityReport:
    if not methods:
        raise ValueError("run_benchmark needs at least one method")
    method_ids = [m.method_id for m in methods]
    if len(set(method_ids)) != len(method_ids):
        raise ValueError("each method may be benchmarked only once")
    # the smallest fraction must still allow k-fold CV
    shrink(ds, schedule.fractions[-1], schedule.row_policy, seed, folds)

    grid = [(spec, fraction) for spec in methods for fraction in schedule.fractions]
    logger.info(f"Benchmarking {len(methods)} methods over {len(schedule.fractions)} fractions ({len(grid)} cells, n_jobs={n_jobs})")
    points = Parallel(n_jobs=n_jobs, prefer="processes")(
        delayed(run_cell)(ds, spec, fraction, seed, schedule.row_policy, folds) for spec, fraction in grid
    )

    per_method: dict[str, list[TrajectoryPoint]] = {m: [] for m in method_ids}
    for (spec, _), point in zip(grid, points):
        per_method[spec.method_id].append(point)

    trajectories = tuple(summarize_trajectory(m, tuple(per_method[m])) for m in method_ids)
    failed = sum(t.error_cells for t in trajectories)
    if failed:
        logger.warning(f"{failed} of {len(grid)} cells failed and are excluded from the statistics")
    logger.info("Benchmark grid complete")
    return rank_methods(SensitivityReport(config=config or {}, trajectories=trajectories))
