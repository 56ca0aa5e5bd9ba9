import math

from pydantic import BaseModel, ConfigDict, NonNegativeFloat, field_validator, model_validator


class OlsModel(BaseModel):
    """Fitted y = X beta + intercept; coefficients are on the original column scale."""

    model_config = ConfigDict(frozen=True)

    coefficients: tuple[float, ...]
    intercept: float
    ridge_lambda: NonNegativeFloat = 0.0

    @field_validator("coefficients")
    @classmethod
    def _finite(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(c) for c in v):
            raise ValueError("coefficients must be finite")
        return v


class CvScore(BaseModel):
    """Per-fold out-of-sample R-squared of one cross-validation run.

    A fold whose held-out target has zero variance is stored as ``None``,
    left out of ``mean_r2`` and ``std_r2``, and sets ``degenerate_folds``.
    """

    model_config = ConfigDict(frozen=True)

    fold_r2: tuple[float | None, ...]
    mean_r2: float
    std_r2: NonNegativeFloat
    seed: int
    degenerate_folds: int = 0

    @property
    def valid_folds(self) -> list[float]:
        return [r for r in self.fold_r2 if r is not None]

    @model_validator(mode="after")
    def _check(self) -> "CvScore":
        valid = self.valid_folds
        if not valid:
            raise ValueError("no fold produced a defined R-squared")
        if any(r > 1.0 for r in valid):
            raise ValueError("fold R-squared cannot exceed 1")
        if abs(self.mean_r2 - math.fsum(valid) / len(valid)) > 1e-12:
            raise ValueError("mean_r2 must equal the mean of the defined fold scores")
        return self
