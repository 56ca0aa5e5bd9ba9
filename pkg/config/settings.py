"""
Run configuration: defaults, then a ``--config`` file, then command-line flags.

The config file is flat ``key=value`` (one per line, ``#`` comments, parsed
with python-dotenv) or a JSON object when the file ends in ``.json``.
"""
import json
import logging
import os
import pathlib
from datetime import date
from typing import Any

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

from benchmark.schemas import ShrinkPolicy, ShrinkSchedule
from dataset.schemas import NormalizationMode
from feature_selection.schemas import ALL_METHODS, DEFAULT_METHODS, ForestParams, LassoParams, SaParams, SelectorSpec
from ingest.synthetic import SyntheticSpec
from regression.cross_validation import PRNG_NAME
from similarity_engine.schemas import MetricParams
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
load_dotenv(PROJECT_ROOT / ".env")

THREADS_ENV_VAR = "SHRINKBENCH_THREADS"

# Fields that change where or how fast a run happens but never its results
_RUNTIME_ONLY = {"out_dir", "threads", "no_timestamp"}


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    data_dir: str | None = None
    synthetic: SyntheticSpec | None = None
    target_id: str = "AAPL.Close"
    horizon: NonNegativeInt = 10
    start_date: date | None = date(2016, 1, 1)
    end_date: date | None = date(2024, 1, 28)

    methods: tuple[str, ...] = DEFAULT_METHODS
    k: PositiveInt = 10
    seed: int = 0
    prescreen: PositiveInt = 50

    epsilon_match: PositiveFloat = 0.25
    gap_ref: float = 0.0
    time_scale: PositiveFloat = 1.0
    normalization: NormalizationMode = NormalizationMode.zscore
    dtw_band: NonNegativeInt | None = None

    sa_t0: PositiveFloat = 0.01
    sa_alpha: float = Field(default=0.95, gt=0.0, le=1.0)
    sa_iters: NonNegativeInt = 200
    lasso_path_len: PositiveInt = 50
    lasso_tol: PositiveFloat = 1e-6
    lasso_max_sweeps: PositiveInt = 1000
    forest_trees: PositiveInt = 100
    forest_max_depth: PositiveInt = 8
    forest_min_leaf: PositiveInt = 5

    full_schedule: bool = False
    schedule_step: float = Field(default=0.05, gt=0.0, le=0.8)
    schedule_stop: float = Field(default=0.2, ge=0.2, le=1.0)
    shrink_policy: ShrinkPolicy = "suffix"

    out_dir: str = "out"
    threads: PositiveInt | None = None
    no_timestamp: bool = False

    @field_validator("synthetic", mode="before")
    @classmethod
    def _parse_synthetic(cls, v):
        if isinstance(v, str):
            return SyntheticSpec.parse(v) if v.strip() else None
        return v

    @field_validator("methods", mode="before")
    @classmethod
    def _parse_methods(cls, v):
        if isinstance(v, str):
            v = [m.strip() for m in v.split(",") if m.strip()]
        return v

    @field_validator("dtw_band", "threads", "data_dir", mode="before")
    @classmethod
    def _blank_is_none(cls, v):
        return None if isinstance(v, str) and not v.strip() else v

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = [m for m in self.methods if m not in ALL_METHODS]
        if unknown:
            raise ValueError(f"unknown method(s) {unknown}; choose from {list(ALL_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")
        if self.data_dir and self.synthetic:
            raise ValueError("give either data_dir or synthetic, not both")
        if self.start_date and self.end_date and self.start_date > self.end_date:
            raise ValueError(f"start_date {self.start_date} is after end_date {self.end_date}")
        if self.prescreen < self.k:
            raise ValueError(f"prescreen ({self.prescreen}) must be >= k ({self.k})")
        return self

    def metric_params(self) -> MetricParams:
        return MetricParams(
            epsilon_match=self.epsilon_match,
            gap_ref=self.gap_ref,
            time_scale=self.time_scale,
            normalization=self.normalization,
            dtw_band=self.dtw_band,
        )

    def schedule(self) -> ShrinkSchedule:
        if self.full_schedule:
            return ShrinkSchedule.full(self.shrink_policy)
        return ShrinkSchedule.stepped(self.schedule_step, self.schedule_stop, self.shrink_policy)

    def selector_spec(self, method_id: str) -> SelectorSpec:
        return SelectorSpec(
            method_id=method_id,
            k=self.k,
            seed=self.seed,
            metric_params=self.metric_params(),
            wrapper_prescreen=self.prescreen,
            sa_params=SaParams(t0=self.sa_t0, alpha=self.sa_alpha, iters=self.sa_iters),
            lasso_params=LassoParams(path_len=self.lasso_path_len, tol=self.lasso_tol, max_sweeps=self.lasso_max_sweeps),
            forest_params=ForestParams(trees=self.forest_trees, max_depth=self.forest_max_depth, min_leaf=self.forest_min_leaf),
        )

    def selector_specs(self) -> list[SelectorSpec]:
        return [self.selector_spec(m) for m in self.methods]

    def snapshot(self, **extra: Any) -> dict[str, Any]:
        """JSON-ready view of every result-affecting setting, plus the PRNG and schedule."""
        snap = self.model_dump(mode="json", exclude=_RUNTIME_ONLY)
        snap["prng"] = PRNG_NAME
        snap["schedule"] = list(self.schedule().fractions)
        snap.update(extra)
        return snap


def read_config_file(path: str | os.PathLike) -> dict[str, Any]:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file {path} does not exist")
    if path.suffix.lower() == ".json":
        try:
            values = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
        if not isinstance(values, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
    else:
        values = dict(dotenv_values(path))
    normalized = {str(k).strip().lower().replace("-", "_"): v for k, v in values.items()}
    unknown = sorted(set(normalized) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {path}: {unknown}")
    logger.debug(f"Read {len(normalized)} settings from {path}")
    return normalized


def build_run_config(config_path: str | os.PathLike | None = None, **overrides: Any) -> RunConfig:
    """Defaults < config file < overrides; overrides that are None are ignored."""
    values = read_config_file(config_path) if config_path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def resolve_threads(config: RunConfig) -> int:
    """Explicit setting, else SHRINKBENCH_THREADS, else the CPU count."""
    if config.threads is not None:
        return config.threads
    env = os.getenv(THREADS_ENV_VAR)
    if env:
        try:
            threads = int(env)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {env!r}") from e
        if threads < 1:
            raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {env!r}")
        return threads
    return os.cpu_count() or 1
