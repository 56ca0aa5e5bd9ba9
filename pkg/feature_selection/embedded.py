import logging
import math

import numba as nb
import numpy as np
from sklearn.ensemble import RandomForestRegressor

from dataset.schemas import AlignedDataset
from feature_selection.ranking import result_from_ranking, result_from_scores, top_k
from feature_selection.schemas import SelectionResult, SelectorSpec

logger = logging.getLogger(__name__)


@nb.njit(cache=True, nogil=True)
def _cd_kernel(X, y, lam, beta, tol, max_sweeps):
    n, m = X.shape
    col_sq = np.zeros(m)
    resid = y.copy()
    for j in range(m):
        for i in range(n):
            col_sq[j] += X[i, j] * X[i, j]
            resid[i] -= X[i, j] * beta[j]
        col_sq[j] /= n
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        max_change = 0.0
        for j in range(m):
            if col_sq[j] == 0.0:
                continue
            old = beta[j]
            rho = 0.0
            for i in range(n):
                rho += X[i, j] * resid[i]
            rho = rho / n + col_sq[j] * old
            if rho > lam:
                new = (rho - lam) / col_sq[j]
            elif rho < -lam:
                new = (rho + lam) / col_sq[j]
            else:
                new = 0.0
            if new != old:
                delta = new - old
                for i in range(n):
                    resid[i] -= X[i, j] * delta
                beta[j] = new
                if abs(delta) > max_change:
                    max_change = abs(delta)
        if max_change < tol:
            converged = True
            break
    return beta, sweeps, converged


def coordinate_descent(X, y, lam: float, beta0=None, tol: float = 1e-6, max_sweeps: int = 1000):
    """
    Cyclic coordinate descent for (1/2N)||y - X beta||^2 + lam * ||beta||_1.
    Returns (beta, sweeps, converged); at max_sweeps the last iterate is returned.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    beta = np.zeros(X.shape[1]) if beta0 is None else np.array(beta0, dtype=np.float64)
    beta, sweeps, converged = _cd_kernel(X, y, float(lam), beta, float(tol), int(max_sweeps))
    return beta, int(sweeps), bool(converged)


def lambda_path(X: np.ndarray, y: np.ndarray, path_len: int) -> np.ndarray:
    """Geometric path from lambda_max = max|x_j'y|/N down to lambda_max * 1e-3."""
    lam_max = float(np.max(np.abs(X.T @ y)) / X.shape[0])
    if path_len == 1:
        return np.array([lam_max])
    return lam_max * np.geomspace(1.0, 1e-3, path_len)


def embedded_lasso(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """
    Picks the smallest lambda on the path with at most k non-zero
    coefficients; short selections are padded from the next-smaller lambda,
    then by order of entry into the path, then by |x_j'y|.
    """
    params = spec.lasso_params
    X = ds.features.values
    varying = np.ptp(X, axis=0) > 0
    Xs = np.zeros_like(X)
    Xs[:, varying] = (X[:, varying] - X[:, varying].mean(axis=0)) / X[:, varying].std(axis=0)
    yc = ds.y - ds.y.mean()
    ids = ds.column_ids
    strength = np.abs(Xs.T @ yc)

    path = lambda_path(Xs, yc, params.path_len)
    beta = np.zeros(X.shape[1])
    coefs, nonconverged = [], []
    for i, lam in enumerate(path):
        beta, sweeps, converged = coordinate_descent(Xs, yc, lam, beta, params.tol, params.max_sweeps)
        if not converged:
            nonconverged.append(float(lam))
        coefs.append(beta.copy())
    if nonconverged:
        logger.warning(f"lasso: {len(nonconverged)} path points hit max_sweeps={params.max_sweeps}")

    nnz = [int(np.count_nonzero(c)) for c in coefs]
    chosen = max(i for i, c in enumerate(nnz) if c <= spec.k)

    def by_magnitude(c: np.ndarray, exclude: set[str]) -> list[str]:
        scores = {ids[j]: abs(c[j]) for j in np.flatnonzero(c) if ids[j] not in exclude}
        return top_k(scores, len(scores))

    ranking = by_magnitude(coefs[chosen], set())
    if chosen + 1 < len(coefs):
        ranking += by_magnitude(coefs[chosen + 1], set(ranking))
    entry = {}
    for i, c in enumerate(coefs):
        for j in np.flatnonzero(c):
            entry.setdefault(ids[j], i)
    taken = set(ranking)
    ranking += sorted((f for f in entry if f not in taken), key=lambda f: (entry[f], f))
    taken = set(ranking)
    rest = {ids[j]: float(strength[j]) for j in range(len(ids)) if ids[j] not in taken}
    ranking += top_k(rest, len(rest))

    return result_from_ranking(
        "lasso", ranking, ids, spec.k,
        {"lambda_chosen": float(path[chosen]), "lambda_max": float(path[0]), "nonzero_at_chosen": nnz[chosen],
         "nonzero_path": nnz, "nonconverged_lambdas": nonconverged, "converged": not nonconverged},
    )


def embedded_tree_importance(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """Impurity importances of a bootstrap random forest with ceil(sqrt(M)) candidate features per split."""
    params = spec.forest_params
    n_features = len(ds.column_ids)
    forest = RandomForestRegressor(
        n_estimators=params.trees,
        max_depth=params.max_depth,
        min_samples_leaf=params.min_leaf,
        max_features=min(n_features, math.ceil(math.sqrt(n_features))),
        bootstrap=True,
        random_state=spec.seed % 2**32,
        n_jobs=1,
    )
    forest.fit(ds.features.values, ds.y)
    importances = forest.feature_importances_
    n_nodes = sum(int(tree.tree_.node_count) for tree in forest.estimators_)
    scores = dict(zip(ds.column_ids, importances.tolist()))
    return result_from_scores("tree_base", scores, spec.k, {"trees": params.trees, "nodes": n_nodes})
