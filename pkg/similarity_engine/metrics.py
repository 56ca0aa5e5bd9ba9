"""
Time-series distance measures.

Every measure takes two non-empty, finite 1-D series that the caller has
already normalized, and returns a finite, non-negative, symmetric distance
that is zero for identical inputs. 1-D dynamic programs use an L1 step cost;
the geometric measures (Hausdorff, discrete Frechet, SSPD) embed each series
as 2-D points via ``embed_points`` and use Euclidean point distance.
"""
import math

import numba as nb
import numpy as np
from scipy.spatial.distance import cdist

from similarity_engine.schemas import MetricParams, embed_points
from utils.errors import MetricError

_DEFAULT_PARAMS = MetricParams()

jitkw = {
    "nopython": True,
    "nogil": True,
    "cache": True,
    "fastmath": False,
}


def _as_series(x, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise MetricError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise MetricError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise MetricError(f"{name} contains NaN or Inf")
    return arr


@nb.jit(**jitkw)
def _dtw_kernel(a, b, band):
    n, m = a.shape[0], b.shape[0]
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if band >= 0 and abs(i - j) > band:
                continue
            best = min(D[i - 1, j], D[i, j - 1], D[i - 1, j - 1])
            D[i, j] = abs(a[i - 1] - b[j - 1]) + best
    return D[n, m]


@nb.jit(**jitkw)
def _lcss_kernel(a, b, eps):
    n, m = a.shape[0], b.shape[0]
    L = np.zeros((n + 1, m + 1), dtype=np.int64)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if abs(a[i - 1] - b[j - 1]) <= eps:
                L[i, j] = L[i - 1, j - 1] + 1
            else:
                L[i, j] = max(L[i - 1, j], L[i, j - 1])
    return L[n, m]


@nb.jit(**jitkw)
def _edr_kernel(a, b, eps):
    n, m = a.shape[0], b.shape[0]
    E = np.zeros((n + 1, m + 1), dtype=np.int64)
    for i in range(n + 1):
        E[i, 0] = i
    for j in range(m + 1):
        E[0, j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            subcost = 0 if abs(a[i - 1] - b[j - 1]) <= eps else 1
            E[i, j] = min(E[i - 1, j - 1] + subcost, E[i - 1, j] + 1, E[i, j - 1] + 1)
    return E[n, m]


@nb.jit(**jitkw)
def _erp_kernel(a, b, g):
    n, m = a.shape[0], b.shape[0]
    E = np.zeros((n + 1, m + 1))
    for i in range(1, n + 1):
        E[i, 0] = E[i - 1, 0] + abs(a[i - 1] - g)
    for j in range(1, m + 1):
        E[0, j] = E[0, j - 1] + abs(b[j - 1] - g)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            E[i, j] = min(
                E[i - 1, j - 1] + abs(a[i - 1] - b[j - 1]),
                E[i - 1, j] + abs(a[i - 1] - g),
                E[i, j - 1] + abs(b[j - 1] - g),
            )
    return E[n, m]


@nb.jit(**jitkw)
def _frechet_kernel(P, Q):
    n, m = P.shape[0], Q.shape[0]
    C = np.full((n + 1, m + 1), np.inf)
    C[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dx = P[i - 1, 0] - Q[j - 1, 0]
            dy = P[i - 1, 1] - Q[j - 1, 1]
            d = math.sqrt(dx * dx + dy * dy)
            C[i, j] = max(d, min(C[i - 1, j], C[i, j - 1], C[i - 1, j - 1]))
    return C[n, m]


def euclidean(a, b) -> float:
    a, b = _as_series(a, "a"), _as_series(b, "b")
    if a.shape != b.shape:
        raise MetricError(f"euclidean distance needs equal lengths, got {a.size} and {b.size}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def dtw(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    """Unnormalized DTW path cost, optionally inside a Sakoe-Chiba band."""
    a, b = _as_series(a, "a"), _as_series(b, "b")
    band = -1 if p.dtw_band is None else int(p.dtw_band)
    cost = _dtw_kernel(a, b, band)
    if not np.isfinite(cost):
        raise MetricError(f"dtw_band={p.dtw_band} admits no warping path between lengths {a.size} and {b.size}")
    return float(cost)


def lcss_distance(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    """1 - L / min(n, m), L the longest epsilon-matching common subsequence."""
    a, b = _as_series(a, "a"), _as_series(b, "b")
    common = _lcss_kernel(a, b, p.epsilon_match)
    return 1.0 - common / min(a.size, b.size)


def edr(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    """Edit distance on real sequences, normalized by max(n, m).

    Benchmarked under the method name ``edit_distance``.
    """
    a, b = _as_series(a, "a"), _as_series(b, "b")
    edits = _edr_kernel(a, b, p.epsilon_match)
    return edits / max(a.size, b.size)


def erp(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    a, b = _as_series(a, "a"), _as_series(b, "b")
    return float(_erp_kernel(a, b, p.gap_ref))


def hausdorff(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    a, b = _as_series(a, "a"), _as_series(b, "b")
    D = cdist(embed_points(a, p.time_scale), embed_points(b, p.time_scale))
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def frechet_discrete(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    a, b = _as_series(a, "a"), _as_series(b, "b")
    P = np.ascontiguousarray(embed_points(a, p.time_scale))
    Q = np.ascontiguousarray(embed_points(b, p.time_scale))
    return float(_frechet_kernel(P, Q))


def _point_to_polyline(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest segment of the polyline."""
    if len(polyline) == 1:
        return np.linalg.norm(points - polyline[0], axis=1)
    start, end = polyline[:-1], polyline[1:]
    seg = end - start
    seg_len2 = np.sum(seg ** 2, axis=1)
    rel = points[:, None, :] - start[None, :, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(seg_len2 > 0, np.sum(rel * seg[None, :, :], axis=2) / seg_len2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = start[None, :, :] + t[:, :, None] * seg[None, :, :]
    return np.linalg.norm(points[:, None, :] - proj, axis=2).min(axis=1)


def sspd(a, b, p: MetricParams = _DEFAULT_PARAMS) -> float:
    """Symmetric segment-path distance: mean point-to-polyline distance, both ways."""
    a, b = _as_series(a, "a"), _as_series(b, "b")
    P, Q = embed_points(a, p.time_scale), embed_points(b, p.time_scale)
    spd_pq = float(_point_to_polyline(P, Q).mean())
    spd_qp = float(_point_to_polyline(Q, P).mean())
    return (spd_pq + spd_qp) / 2.0
