"""
Randomized k-fold cross-validation of OLS.

Rows are shuffled with numpy's PCG64 generator seeded directly by ``seed``
and split into ``folds`` near-equal parts with ``np.array_split``. Folds
ignore time order, so neighbouring days can sit in train and test folds.
"""
import logging
import math
from functools import lru_cache

import numpy as np

from dataset.schemas import AlignedDataset
from regression.ols import fit_ols_stabilized, predict, r_squared
from regression.schemas import CvScore
from utils.errors import UndefinedRSquaredError

logger = logging.getLogger(__name__)

PRNG_NAME = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@lru_cache(maxsize=256)
def fold_assignment(n_rows: int, folds: int, seed: int) -> tuple[np.ndarray, ...]:
    """Held-out row indices of each fold."""
    if not 2 <= folds <= n_rows:
        raise ValueError(f"need 2 <= folds <= N, got folds={folds}, N={n_rows}")
    perm = make_rng(seed).permutation(n_rows)
    parts = tuple(np.array_split(perm, folds))
    for part in parts:
        part.setflags(write=False)
    return parts


def cv_fold_scores(X: np.ndarray, y: np.ndarray, folds: int = 10, seed: int = 0) -> list[float | None]:
    """Out-of-sample R-squared per fold; None where the held-out target is constant."""
    parts = fold_assignment(len(y), folds, seed)
    scores: list[float | None] = []
    for i, test_idx in enumerate(parts):
        train_idx = np.concatenate([p for j, p in enumerate(parts) if j != i])
        model = fit_ols_stabilized(X[train_idx], y[train_idx])
        try:
            scores.append(r_squared(y[test_idx], predict(model, X[test_idx])))
        except UndefinedRSquaredError:
            logger.warning(f"Fold {i} of {folds} (seed {seed}) has a constant target; its R-squared is left out")
            scores.append(None)
    return scores


def cv_mean_r2(X: np.ndarray, y: np.ndarray, folds: int = 10, seed: int = 0) -> float:
    """Mean of the defined fold scores; the objective wrappers maximize."""
    valid = [s for s in cv_fold_scores(X, y, folds, seed) if s is not None]
    if not valid:
        return -math.inf
    return math.fsum(valid) / len(valid)


def kfold_cv(ds: AlignedDataset, subset: list[str] | tuple[str, ...], folds: int = 10, seed: int = 0) -> CvScore:
    if not subset:
        raise ValueError("kfold_cv needs a non-empty feature subset")
    X = ds.features.columns(list(subset))
    fold_r2 = cv_fold_scores(X, ds.y, folds, seed)
    valid = [s for s in fold_r2 if s is not None]
    if not valid:
        raise UndefinedRSquaredError(f"every one of the {folds} folds has a constant target")
    mean = math.fsum(valid) / len(valid)
    std = float(np.std(valid, ddof=1)) if len(valid) > 1 else 0.0
    return CvScore(
        fold_r2=tuple(fold_r2),
        mean_r2=mean,
        std_r2=std,
        seed=seed,
        degenerate_folds=len(fold_r2) - len(valid),
    )
