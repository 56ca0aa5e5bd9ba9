import logging
from typing import Callable

import numpy as np

from dataset.alignment import normalize, normalize_columns
from similarity_engine import metrics
from similarity_engine.schemas import MetricParams

logger = logging.getLogger(__name__)

DistanceFn = Callable[[np.ndarray, np.ndarray, MetricParams], float]

# method id -> distance; "edit_distance" is bound to EDR
METRICS: dict[str, DistanceFn] = {
    "eu": lambda a, b, p: metrics.euclidean(a, b),
    "dtw": metrics.dtw,
    "hausdorff": metrics.hausdorff,
    "frechet": metrics.frechet_discrete,
    "edit_distance": metrics.edr,
    "lcss": metrics.lcss_distance,
    "erp": metrics.erp,
    "sspd": metrics.sspd,
}

DEFAULT_SIMILARITY_METHODS = ("eu", "dtw", "hausdorff", "frechet", "edit_distance")
EXTRA_SIMILARITY_METHODS = ("lcss", "erp", "sspd")


def get_metric(name: str) -> DistanceFn:
    try:
        return METRICS[name]
    except KeyError:
        raise KeyError(f"Unknown similarity metric {name!r}; expected one of {sorted(METRICS)}") from None


def compute_distances_to_reference(
    reference: np.ndarray,
    candidates: np.ndarray,
    candidate_ids: tuple[str, ...] | list[str],
    metric: str,
    params: MetricParams = MetricParams(),
) -> dict[str, float]:
    """
    Distance from every candidate column to the reference series, both
    normalized per ``params.normalization`` before comparison.
    """
    fn = get_metric(metric)
    ref = normalize(reference, params.normalization)
    cols = normalize_columns(candidates, params.normalization)

    distances: dict[str, float] = {}
    for j, column_id in enumerate(candidate_ids):
        distances[column_id] = fn(cols[:, j], ref, params)
        if (j + 1) % 100 == 0 or j + 1 == len(candidate_ids):
            logger.debug(f"{metric}: scored {j + 1}/{len(candidate_ids)} candidates")
    return distances


def find_most_similar_features(
    reference: np.ndarray,
    candidates: np.ndarray,
    candidate_ids: tuple[str, ...] | list[str],
    metric: str,
    k: int,
    params: MetricParams = MetricParams(),
) -> list[tuple[str, float]]:
    """The k candidates closest to the reference, ties broken by id."""
    distances = compute_distances_to_reference(reference, candidates, candidate_ids, metric, params)
    ranked = sorted(distances.items(), key=lambda item: (item[1], item[0]))
    return ranked[:k]
