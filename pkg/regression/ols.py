"""
Ordinary least squares with an optional ridge stabilizer, and R-squared.

Columns are standardized for the solve and the coefficients mapped back to
the original scale; the ridge penalty applies to the standardized
coefficients and the intercept is never penalized.
"""
import logging

import numpy as np

from regression.schemas import OlsModel
from utils.errors import RankDeficientError, UndefinedRSquaredError

logger = logging.getLogger(__name__)


def _design(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X


def default_ridge_lambda(X) -> float:
    """1e-8 * mean standardized column variance * k."""
    X = _design(X)
    k = X.shape[1]
    std_var = (np.ptp(X, axis=0) > 0).astype(float)  # 1 for varying columns, 0 for constant ones
    return max(1e-8 * float(std_var.mean()) * k, 1e-8)


def fit_ols(X, y, ridge_lambda: float = 0.0) -> OlsModel:
    """
    Minimizes ||y - X beta - b||^2 + ridge_lambda * ||beta_std||^2.
    With ridge_lambda == 0 a rank-deficient design raises RankDeficientError.
    """
    X = _design(X)
    y = np.asarray(y, dtype=np.float64)
    n, k = X.shape
    if n < 2 or k < 1:
        raise ValueError(f"fit_ols needs N >= 2 and k >= 1, got N={n}, k={k}")
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("fit_ols inputs must be finite")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")

    mu = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    varying = np.ptp(X, axis=0) > 0
    Xs = np.zeros_like(X)
    Xs[:, varying] = (X[:, varying] - mu[varying]) / sd[varying]
    y_mean = y.mean()
    yc = y - y_mean

    if ridge_lambda == 0.0:
        if not varying.all():
            raise RankDeficientError("design has a constant column; refit with ridge_lambda > 0")
        beta_s, _, rank, _ = np.linalg.lstsq(Xs, yc, rcond=None)
        if rank < k:
            raise RankDeficientError(f"design has rank {rank} < {k} columns; refit with ridge_lambda > 0")
    else:
        A = np.vstack([Xs, np.sqrt(ridge_lambda) * np.eye(k)])
        rhs = np.concatenate([yc, np.zeros(k)])
        beta_s = np.linalg.lstsq(A, rhs, rcond=None)[0]

    beta = np.zeros(k)
    beta[varying] = beta_s[varying] / sd[varying]
    intercept = float(y_mean - mu @ beta)
    return OlsModel(coefficients=tuple(float(b) for b in beta), intercept=intercept, ridge_lambda=ridge_lambda)


def fit_ols_stabilized(X, y) -> OlsModel:
    """Plain OLS when the design allows it, otherwise the default ridge stabilizer."""
    X = _design(X)
    n, k = X.shape
    if k < n:
        try:
            return fit_ols(X, y, 0.0)
        except RankDeficientError as e:
            logger.debug(f"Falling back to ridge stabilizer: {e}")
    return fit_ols(X, y, default_ridge_lambda(X))


def predict(m: OlsModel, X) -> np.ndarray:
    X = _design(X)
    if X.shape[1] != len(m.coefficients):
        raise ValueError(f"X has {X.shape[1]} columns but the model has {len(m.coefficients)} coefficients")
    return X @ np.asarray(m.coefficients) + m.intercept


def r_squared(y_true, y_pred) -> float:
    """1 - SS_res / SS_tot. Negative when predictions are worse than the mean."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError(f"r_squared needs equal non-zero lengths, got {y_true.shape} and {y_pred.shape}")
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedRSquaredError("R-squared is undefined for a constant target")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot
