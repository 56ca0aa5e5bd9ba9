"""
Seeded synthetic OHLCV universe with planted predictors.

Tickers are geometric random walks. The first ticker is always ``AAPL`` so
the default target ``AAPL.Close`` exists. ``planted_count`` non-target
columns are overwritten with noisy copies of the target, with noise
``N(0, (noise_sigma * std(target))^2)``, and listed in the manifest.

Planted columns come in two kinds, alternating in column order starting
with a leader:

* leaders copy the target ``lead`` rows ahead, so with the matching
  ``horizon`` they are ``y + noise`` and carry what a predictive selector
  is scored on;
* mirrors copy the same-day target and are what a shape-matching
  selector compares against.

With ``lead=0`` every planted column is a same-day copy.
"""
import logging
from datetime import date

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, NonNegativeInt, model_validator

from dataset.schemas import TimeSeries
from ingest.loader import FIELDS
from regression.cross_validation import make_rng
from utils.errors import ConfigError
from utils.file_ops import derive_seed

logger = logging.getLogger(__name__)

TARGET_TICKER = "AAPL"
TARGET_ID = f"{TARGET_TICKER}.Close"
START_DATE = date(2016, 1, 4)


class SyntheticSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_rows: int = Field(600, ge=30)
    n_tickers: int = Field(24, ge=1)
    planted_count: int = Field(3, ge=0)
    noise_sigma: NonNegativeFloat = 0.05
    lead: NonNegativeInt = 10
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "SyntheticSpec":
        if self.planted_count >= 5 * self.n_tickers:
            raise ValueError(
                f"planted_count ({self.planted_count}) must be below 5 * n_tickers ({5 * self.n_tickers})"
            )
        return self

    @classmethod
    def parse(cls, text: str) -> "SyntheticSpec":
        """Parses ``n_rows=600,n_tickers=24,...``; omitted keys keep their defaults."""
        values = {}
        for item in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"synthetic spec item '{item}' is not key=value")
            values[key.strip()] = value.strip()
        try:
            return cls.model_validate(values)
        except ValueError as e:
            raise ConfigError(f"invalid synthetic spec '{text}': {e}") from e


def ticker_names(n_tickers: int) -> list[str]:
    return [TARGET_TICKER] + [f"T{i:03d}" for i in range(1, n_tickers)]


def planted_ids(spec: SyntheticSpec) -> list[str]:
    """Columns overwritten with noisy copies of the target, in column order."""
    candidates = [f"{t}.{f}" for t in ticker_names(spec.n_tickers) for f in FIELDS]
    candidates.remove(TARGET_ID)
    rng = make_rng(derive_seed(spec.seed, "planted"))
    chosen = rng.choice(len(candidates), size=spec.planted_count, replace=False)
    return [candidates[i] for i in sorted(chosen.tolist())]


def leading_ids(spec: SyntheticSpec) -> list[str]:
    """The planted columns that copy the target ``lead`` rows ahead."""
    if spec.lead == 0:
        return []
    return planted_ids(spec)[::2]


def _ohlcv(rng: np.random.Generator, n: int) -> dict[str, np.ndarray]:
    start = rng.uniform(20.0, 200.0)
    drift = rng.normal(2e-4, 2e-4)
    vol = rng.uniform(0.01, 0.03)
    close = start * np.exp(np.cumsum(drift + vol * rng.standard_normal(n)))
    prev = np.concatenate(([start], close[:-1]))
    open_ = prev * np.exp(0.25 * vol * rng.standard_normal(n))
    high = np.maximum(open_, close) * (1.0 + np.abs(0.5 * vol * rng.standard_normal(n)))
    low = np.minimum(open_, close) * (1.0 - np.abs(0.5 * vol * rng.standard_normal(n)))
    volume = np.exp(np.log(rng.uniform(1e5, 1e7)) + np.cumsum(0.05 * rng.standard_normal(n)))
    return {"Open": open_, "High": high, "Low": low, "Close": close, "Volume": np.round(volume)}


def generate_synthetic(spec: SyntheticSpec) -> list[TimeSeries]:
    """Same spec, same series: every draw comes from PRNGs keyed by spec.seed."""
    n = spec.n_rows
    dates = tuple(d.date() for d in pd.bdate_range(START_DATE, periods=n))
    columns: dict[str, np.ndarray] = {}
    walks: dict[str, np.ndarray] = {}
    for ticker in ticker_names(spec.n_tickers):
        rng = make_rng(derive_seed(spec.seed, "ticker", ticker))
        for field, values in _ohlcv(rng, n + spec.lead).items():
            walks[f"{ticker}.{field}"] = values
            columns[f"{ticker}.{field}"] = values[:n]

    target = walks[TARGET_ID]
    scale = spec.noise_sigma * float(np.std(columns[TARGET_ID], ddof=1))
    noise_rng = make_rng(derive_seed(spec.seed, "noise"))
    leaders = set(leading_ids(spec))
    for fid in planted_ids(spec):
        shift = spec.lead if fid in leaders else 0
        columns[fid] = target[shift:shift + n] + scale * noise_rng.standard_normal(n)

    logger.info(
        f"Generated {len(columns)} synthetic series ({spec.n_tickers} tickers x {n} rows, "
        f"{spec.planted_count} planted, {len(leaders)} leading by {spec.lead})"
    )
    return [TimeSeries(id=fid, dates=dates, values=values) for fid, values in columns.items()]


def synthetic_manifest(spec: SyntheticSpec) -> dict:
    return {
        "spec": spec.model_dump(),
        "target_id": TARGET_ID,
        "tickers": ticker_names(spec.n_tickers),
        "planted_ids": planted_ids(spec),
        "leading_ids": leading_ids(spec),
    }
