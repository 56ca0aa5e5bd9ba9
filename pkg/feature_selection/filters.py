"""Model-independent filter selectors: variance, correlation, mutual information."""
import logging
import math

import numpy as np
from scipy.stats import rankdata

from dataset.schemas import AlignedDataset
from feature_selection.ranking import abs_correlations, result_from_scores
from feature_selection.schemas import SelectionResult

logger = logging.getLogger(__name__)


def filter_variance(ds: AlignedDataset, k: int) -> SelectionResult:
    """Top-k by sample variance of the raw columns."""
    variances = ds.features.values.var(axis=0, ddof=1)
    scores = dict(zip(ds.column_ids, variances.tolist()))
    return result_from_scores("var", scores, k)


def filter_correlation(ds: AlignedDataset, k: int) -> SelectionResult:
    """Top-k by |Pearson r| with the horizon target."""
    scores = dict(zip(ds.column_ids, abs_correlations(ds.features.values, ds.y).tolist()))
    return result_from_scores("cor", scores, k)


def equal_frequency_bins(x: np.ndarray, n_bins: int) -> np.ndarray:
    """
    Bin index per value so that each bin holds about len(x)/n_bins values.
    Tied values always share a bin.
    """
    ranks = rankdata(x, method="min")
    return np.minimum(((ranks - 1) * n_bins // len(x)).astype(np.int64), n_bins - 1)


def mutual_information(x_bins: np.ndarray, y_bins: np.ndarray, n_bins: int) -> float:
    """Plug-in MI, in nats, from the joint histogram of two binned variables."""
    joint = np.bincount(x_bins * n_bins + y_bins, minlength=n_bins * n_bins).reshape(n_bins, n_bins)
    p_xy = joint / joint.sum()
    p_x = p_xy.sum(axis=1, keepdims=True)
    p_y = p_xy.sum(axis=0, keepdims=True)
    nz = p_xy > 0
    return float(max(np.sum(p_xy[nz] * np.log(p_xy[nz] / (p_x @ p_y)[nz])), 0.0))


def filter_mutual_information(ds: AlignedDataset, k: int) -> SelectionResult:
    """Top-k by histogram mutual information with ceil(sqrt(N)) equal-frequency bins."""
    n_bins = math.ceil(math.sqrt(ds.n_rows))
    y_bins = equal_frequency_bins(ds.y, n_bins)
    X = ds.features.values
    scores = {
        fid: mutual_information(equal_frequency_bins(X[:, j], n_bins), y_bins, n_bins) if np.ptp(X[:, j]) > 0 else 0.0
        for j, fid in enumerate(ds.column_ids)
    }
    return result_from_scores("mutual_information", scores, k, {"bins": n_bins})
