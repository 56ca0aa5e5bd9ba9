from typing import Any

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt, model_validator

from similarity_engine.engine import DEFAULT_SIMILARITY_METHODS, EXTRA_SIMILARITY_METHODS
from similarity_engine.schemas import MetricParams

FILTER_METHODS = ("var", "cor", "mutual_information")
WRAPPER_METHODS = ("forward", "backward", "stepwise", "rfe", "simulated")
EMBEDDED_METHODS = ("lasso", "tree_base")
SIMILARITY_METHODS = DEFAULT_SIMILARITY_METHODS

DEFAULT_METHODS = FILTER_METHODS + WRAPPER_METHODS + EMBEDDED_METHODS + SIMILARITY_METHODS
EXTRA_METHODS = EXTRA_SIMILARITY_METHODS
ALL_METHODS = DEFAULT_METHODS + EXTRA_METHODS

FAMILIES: dict[str, tuple[str, ...]] = {
    "filter": FILTER_METHODS,
    "wrapper": WRAPPER_METHODS,
    "embedded": EMBEDDED_METHODS,
    "similarity": SIMILARITY_METHODS + EXTRA_METHODS,
}


def method_family(method_id: str) -> str:
    for family, members in FAMILIES.items():
        if method_id in members:
            return family
    raise KeyError(f"Unknown method {method_id!r}")


class SaParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    t0: PositiveFloat = 0.01
    alpha: float = Field(default=0.95, gt=0.0, le=1.0)
    iters: NonNegativeInt = 200


class LassoParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    path_len: PositiveInt = 50
    tol: PositiveFloat = 1e-6
    max_sweeps: PositiveInt = 1000


class ForestParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    trees: PositiveInt = 100
    max_depth: PositiveInt = 8
    min_leaf: PositiveInt = 5


class SelectorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    method_id: str
    k: PositiveInt = 10
    seed: int = 0
    metric_params: MetricParams = MetricParams()
    wrapper_prescreen: PositiveInt = 50
    cv_folds: int = Field(default=10, ge=2)
    sa_params: SaParams = SaParams()
    lasso_params: LassoParams = LassoParams()
    forest_params: ForestParams = ForestParams()

    @model_validator(mode="after")
    def _check(self) -> "SelectorSpec":
        if self.method_id not in ALL_METHODS:
            raise ValueError(f"Unknown method {self.method_id!r}; expected one of {list(ALL_METHODS)}")
        if self.wrapper_prescreen < self.k:
            raise ValueError(f"wrapper_prescreen ({self.wrapper_prescreen}) must be >= k ({self.k})")
        return self


class SelectionResult(BaseModel):
    """
    The k chosen feature ids, most preferred first, with a score for every
    candidate (higher is better; distances are negated). ``selected`` is the
    top-k of ``scores`` with ties broken by feature id.
    """

    model_config = ConfigDict(frozen=True)

    method_id: str
    selected: tuple[str, ...]
    scores: dict[str, float]
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> "SelectionResult":
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected features must be unique")
        missing = [f for f in self.selected if f not in self.scores]
        if missing:
            raise ValueError(f"selected features without a score: {missing}")
        return self
