"""Score/ranking helpers shared by every selector family."""
import numpy as np

from dataset.schemas import AlignedDataset
from feature_selection.schemas import SelectionResult


def top_k(scores: dict[str, float], k: int) -> list[str]:
    """Highest scores first; equal scores resolve to the smaller feature id."""
    return [fid for fid, _ in sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:k]]


def result_from_scores(method_id: str, scores: dict[str, float], k: int, diagnostics: dict | None = None) -> SelectionResult:
    return SelectionResult(
        method_id=method_id,
        selected=tuple(top_k(scores, k)),
        scores=scores,
        diagnostics=diagnostics or {},
    )


def result_from_ranking(
    method_id: str,
    ranking: list[str],
    column_ids: tuple[str, ...],
    k: int,
    diagnostics: dict | None = None,
) -> SelectionResult:
    """
    For search-based selectors whose output is an order rather than a score:
    the feature at position i of ``ranking`` scores len(ranking) - i, features
    outside the ranking score 0.
    """
    if len(ranking) < k or len(set(ranking)) != len(ranking):
        raise ValueError(f"ranking must hold at least k={k} distinct features")
    scores = {fid: 0.0 for fid in column_ids}
    for pos, fid in enumerate(ranking):
        scores[fid] = float(len(ranking) - pos)
    return SelectionResult(
        method_id=method_id,
        selected=tuple(ranking[:k]),
        scores=scores,
        diagnostics=diagnostics or {},
    )


def abs_correlations(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|Pearson r| of every column with y; constant columns (or y) give 0."""
    xc = X - X.mean(axis=0)
    yc = y - y.mean()
    num = xc.T @ yc
    den = np.sqrt(np.sum(xc ** 2, axis=0) * np.sum(yc ** 2))
    out = np.zeros(X.shape[1])
    ok = (den > 0) & (np.ptp(X, axis=0) > 0)
    if np.ptp(y) > 0:
        out[ok] = np.abs(num[ok] / den[ok])
    return np.minimum(out, 1.0)


def prescreen_pool(ds: AlignedDataset, k: int, pool_size: int) -> list[str]:
    """The top max(pool_size, k) features by |correlation| with y, best first."""
    scores = dict(zip(ds.column_ids, abs_correlations(ds.features.values, ds.y).tolist()))
    size = min(max(pool_size, k), len(scores))
    return top_k(scores, size)
