import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveFloat

from dataset.schemas import NormalizationMode


class MetricParams(BaseModel):
    """Tunables shared by the time-series distance measures.

    ``epsilon_match`` is in the units of the compared values, i.e. z-score
    units under the default normalization.
    """

    model_config = ConfigDict(frozen=True)

    epsilon_match: PositiveFloat = 0.25
    gap_ref: float = 0.0
    time_scale: PositiveFloat = 1.0
    normalization: NormalizationMode = NormalizationMode.zscore
    dtw_band: NonNegativeInt | None = None


def embed_points(values: np.ndarray, time_scale: float = 1.0) -> np.ndarray:
    """(t, v) points with t = time_scale * i / (n - 1); a single point sits at t = 0."""
    n = len(values)
    t = np.zeros(n) if n == 1 else time_scale * np.arange(n) / (n - 1)
    return np.column_stack([t, np.asarray(values, dtype=np.float64)])
