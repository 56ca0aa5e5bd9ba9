import logging
from itertools import combinations

import numpy as np
import pandas as pd

from dataset.schemas import AlignedDataset, FeatureMatrix, NormalizationMode, TimeSeries
from utils.errors import AlignmentError, HorizonError

logger = logging.getLogger(__name__)


def align(series: list[TimeSeries]) -> FeatureMatrix:
    """
    Inner-joins series on their dates. Rows are the dates present in every
    series, ascending; columns keep the input order.
    """
    if not series:
        raise AlignmentError("align() needs at least one series")

    frame = pd.concat(
        [pd.Series(s.values, index=pd.Index(s.dates), name=s.id) for s in series],
        axis=1,
        join="inner",
    ).sort_index()

    if len(frame) < 2:
        a, b = _smallest_overlap(series)
        raise AlignmentError(
            f"{len(frame)} date(s) shared by all series, need at least 2; smallest overlap is between {a!r} and {b!r}"
        )

    dropped = max(len(s.dates) for s in series) - len(frame)
    logger.info(f"Aligned {len(series)} series on {len(frame)} common dates ({dropped} dates dropped from the longest series)")
    return FeatureMatrix(
        column_ids=tuple(s.id for s in series),
        dates=tuple(frame.index),
        values=frame.to_numpy(dtype=np.float64),
    )


def _smallest_overlap(series: list[TimeSeries]) -> tuple[str, str]:
    if len(series) == 1:
        return series[0].id, series[0].id
    date_sets = [set(s.dates) for s in series]
    i, j = min(
        combinations(range(len(series)), 2),
        key=lambda ij: (len(date_sets[ij[0]] & date_sets[ij[1]]), ij),
    )
    return series[i].id, series[j].id


def build_horizon_target(m: FeatureMatrix, target_id: str, horizon: int = 10) -> AlignedDataset:
    """Pairs row t of the features with the target value at row t + horizon."""
    if target_id not in m.column_ids:
        raise HorizonError(f"Unknown target column {target_id!r}")
    if horizon < 0:
        raise HorizonError(f"horizon must be non-negative, got {horizon}")
    # at least two rows must survive the shift
    if horizon > m.n_rows - 2:
        raise HorizonError(f"horizon {horizon} leaves fewer than 2 of {m.n_rows} rows")

    kept = m.n_rows - horizon
    target = m.column(target_id)
    return AlignedDataset(
        features=m.take_rows(np.arange(kept)),
        target_id=target_id,
        y=target[horizon:],
        horizon=horizon,
    )


def normalize(values, mode: NormalizationMode | str = NormalizationMode.zscore) -> np.ndarray:
    """z-scores with the sample (n-1) std; constant input maps to zeros."""
    x = np.asarray(values, dtype=np.float64)
    if NormalizationMode(mode) is NormalizationMode.none:
        return x.copy()
    if x.size < 2 or np.ptp(x) == 0:
        return np.zeros_like(x)
    return (x - x.mean()) / x.std(ddof=1)


def normalize_columns(X: np.ndarray, mode: NormalizationMode | str = NormalizationMode.zscore) -> np.ndarray:
    """Column-wise ``normalize`` of an N x M block."""
    X = np.asarray(X, dtype=np.float64)
    if NormalizationMode(mode) is NormalizationMode.none:
        return X.copy()
    out = np.zeros_like(X)
    if X.shape[0] < 2:
        return out
    varying = np.ptp(X, axis=0) > 0
    sub = X[:, varying]
    out[:, varying] = (sub - sub.mean(axis=0)) / sub.std(axis=0, ddof=1)
    return out
