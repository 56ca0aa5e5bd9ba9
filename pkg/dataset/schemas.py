"""Immutable data model shared by every other package.

Numeric payloads are numpy arrays marked read-only after validation, so a
validated object can be handed to worker threads or processes unchanged.
"""
from datetime import date
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(value, ndim: int) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite (no NaN or Inf)")
    arr.setflags(write=False)
    return arr


def _check_increasing(dates: tuple[date, ...]) -> None:
    for prev, cur in zip(dates, dates[1:]):
        if cur <= prev:
            raise ValueError(f"dates must be strictly increasing ({prev} then {cur})")


class NormalizationMode(str, Enum):
    none = "none"
    zscore = "zscore"


class TimeSeries(BaseModel):
    """One named, date-indexed series such as ``AAPL.Close``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    dates: tuple[date, ...]
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, v):
        return _frozen_array(v, 1)

    @model_validator(mode="after")
    def _check(self) -> "TimeSeries":
        if len(self.dates) != len(self.values):
            raise ValueError(f"{self.id}: {len(self.dates)} dates but {len(self.values)} values")
        if len(self.dates) < 2:
            raise ValueError(f"{self.id}: a series needs at least 2 observations")
        _check_increasing(self.dates)
        return self


class FeatureMatrix(BaseModel):
    """N dated rows by M uniquely named feature columns."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    column_ids: tuple[str, ...]
    dates: tuple[date, ...]
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, v):
        return _frozen_array(v, 2)

    @model_validator(mode="after")
    def _check(self) -> "FeatureMatrix":
        n, m = self.values.shape
        if len(set(self.column_ids)) != len(self.column_ids):
            raise ValueError("column_ids must be unique")
        if m != len(self.column_ids):
            raise ValueError(f"{m} value columns but {len(self.column_ids)} column ids")
        if n != len(self.dates):
            raise ValueError(f"{n} value rows but {len(self.dates)} dates")
        if n < 2:
            raise ValueError("a feature matrix needs at least 2 rows")
        _check_increasing(self.dates)
        return self

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column_index(self, column_id: str) -> int:
        try:
            return self.column_ids.index(column_id)
        except ValueError:
            raise KeyError(column_id) from None

    def column(self, column_id: str) -> np.ndarray:
        return self.values[:, self.column_index(column_id)]

    def columns(self, column_ids: list[str] | tuple[str, ...]) -> np.ndarray:
        """N x len(column_ids) block in the requested column order."""
        idx = [self.column_index(c) for c in column_ids]
        return self.values[:, idx]

    def take_rows(self, rows: np.ndarray) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.intp)
        return FeatureMatrix(
            column_ids=self.column_ids,
            dates=tuple(self.dates[i] for i in rows),
            values=self.values[rows],
        )


class AlignedDataset(BaseModel):
    """Feature matrix plus the target shifted ``horizon`` rows into the future.

    ``y[t]`` is the raw target value at row ``t + horizon`` of the matrix the
    dataset was built from; the target column itself stays a feature.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    features: FeatureMatrix
    target_id: str
    y: np.ndarray
    horizon: int = Field(default=10, ge=0)

    @field_validator("y", mode="before")
    @classmethod
    def _coerce_y(cls, v):
        return _frozen_array(v, 1)

    @model_validator(mode="after")
    def _check(self) -> "AlignedDataset":
        if len(self.y) != self.features.n_rows:
            raise ValueError(f"len(y)={len(self.y)} but the matrix has {self.features.n_rows} rows")
        if self.target_id not in self.features.column_ids:
            raise ValueError(f"target {self.target_id!r} is not a feature column")
        return self

    @property
    def n_rows(self) -> int:
        return self.features.n_rows

    @property
    def column_ids(self) -> tuple[str, ...]:
        return self.features.column_ids

    @property
    def target_series(self) -> np.ndarray:
        """Contemporaneous (unshifted) target column over the current rows."""
        return self.features.column(self.target_id)

    def take_rows(self, rows: np.ndarray) -> "AlignedDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return AlignedDataset(
            features=self.features.take_rows(rows),
            target_id=self.target_id,
            y=self.y[rows],
            horizon=self.horizon,
        )
