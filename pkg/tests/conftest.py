from datetime import date, timedelta

import numpy as np
import pytest

from dataset.schemas import AlignedDataset, FeatureMatrix


def make_dataset(X, y, ids=None, target: int = 0, start=date(2020, 1, 1)) -> AlignedDataset:
    X = np.asarray(X, dtype=float)
    n, m = X.shape
    ids = tuple(ids) if ids is not None else tuple(f"f{j:02d}" for j in range(m))
    dates = tuple(start + timedelta(days=i) for i in range(n))
    return AlignedDataset(
        features=FeatureMatrix(column_ids=ids, dates=dates, values=X),
        target_id=ids[target],
        y=y,
        horizon=0,
    )


@pytest.fixture
def planted_linear():
    """300 rows, 15 Gaussian columns, y driven by f03, f07 and f11."""
    rng = np.random.default_rng(11)
    X = rng.standard_normal((300, 15))
    y = 2.0 * X[:, 3] - 1.5 * X[:, 7] + 1.0 * X[:, 11] + 0.05 * rng.standard_normal(300)
    return make_dataset(X, y)


@pytest.fixture
def exact_linear():
    """200 rows, 4 columns, y an exact linear function of all of them."""
    rng = np.random.default_rng(5)
    X = rng.standard_normal((200, 4)) + np.array([10.0, 0.0, -3.0, 1.0])
    y = X @ np.array([1.0, -2.0, 0.5, 3.0]) + 4.0
    return make_dataset(X, y)


@pytest.fixture
def random_walks():
    """100 rows: f00 a random walk, f01 a near copy, f02 an affine copy, f03..f09 unrelated walks."""
    rng = np.random.default_rng(21)
    X = np.cumsum(rng.standard_normal((100, 10)), axis=0)
    X[:, 1] = X[:, 0] + 1e-3 * rng.standard_normal(100)
    X[:, 2] = 2.0 * X[:, 0] + 5.0
    return make_dataset(X, X[:, 0] * 1.0)
