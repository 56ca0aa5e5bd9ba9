from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, model_validator

from feature_selection.schemas import method_family

ShrinkPolicy = Literal["suffix", "prefix", "random"]


class ShrinkSchedule(BaseModel):
    """Retained-data fractions, 1.00 first, descending, never below 0.20."""

    model_config = ConfigDict(frozen=True)

    fractions: tuple[float, ...]
    row_policy: ShrinkPolicy = "suffix"

    @model_validator(mode="after")
    def _check(self) -> "ShrinkSchedule":
        f = self.fractions
        if not f:
            raise ValueError("a schedule needs at least one fraction")
        if f[0] != 1.0:
            raise ValueError("a schedule starts at 1.00")
        if any(b >= a for a, b in zip(f, f[1:])):
            raise ValueError("fractions must be strictly decreasing")
        if f[-1] < 0.2 - 1e-12:
            raise ValueError("fractions cannot go below 0.20")
        return self

    @classmethod
    def stepped(cls, step: float = 0.01, stop: float = 0.2, row_policy: ShrinkPolicy = "suffix") -> "ShrinkSchedule":
        """1.00, 1.00 - step, ... down to stop inclusive, rounded to 4 decimals."""
        count = int(round((1.0 - stop) / step))
        fractions = tuple(round(1.0 - i * step, 4) for i in range(count + 1))
        return cls(fractions=tuple(x for x in fractions if x >= stop - 1e-12), row_policy=row_policy)

    @classmethod
    def full(cls, row_policy: ShrinkPolicy = "suffix") -> "ShrinkSchedule":
        """81 points: 100% down to 20% in 1-point steps (80 reductions)."""
        return cls.stepped(0.01, 0.2, row_policy)

    @classmethod
    def desk(cls, row_policy: ShrinkPolicy = "suffix") -> "ShrinkSchedule":
        """17 points in 5-point steps."""
        return cls.stepped(0.05, 0.2, row_policy)


class TrajectoryPoint(BaseModel):
    """One benchmark cell: a method scored at one retained fraction.

    ``mean_r2`` is the 10-fold mean; it is None when the cell failed and
    ``error`` says why.
    """

    model_config = ConfigDict(frozen=True)

    fraction: float
    n_rows: int = 0
    mean_r2: float | None = None
    fold_std: float | None = None
    selected: tuple[str, ...] = ()
    error: str | None = None


class MethodTrajectory(BaseModel):
    model_config = ConfigDict(frozen=True)

    method_id: str
    family: str = ""
    points: tuple[TrajectoryPoint, ...]
    slope: float | None = None
    intercept: float | None = None
    fluctuation: NonNegativeFloat | None = None
    mean_r2_overall: float | None = None
    mean_fold_std: float | None = None
    error_cells: int = 0

    @model_validator(mode="before")
    @classmethod
    def _default_family(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("family"):
            try:
                data = {**data, "family": method_family(data.get("method_id", ""))}
            except KeyError:
                pass
        return data

    def valid_points(self) -> list[tuple[float, float]]:
        return [(p.fraction, p.mean_r2) for p in self.points if p.mean_r2 is not None]


class FamilySummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: str
    methods: tuple[str, ...]
    mean_r2: float | None = None
    mean_abs_slope: float | None = None
    mean_fluctuation: float | None = None


class SensitivityReport(BaseModel):
    """
    R-squared trajectories of every method over the shrink schedule, with
    trend statistics and three rankings. Ranks are method ids, best first;
    ``composite_rank`` orders by the sum of the three 1-based ranks.
    """

    model_config = ConfigDict(frozen=True)

    config: dict[str, Any] = Field(default_factory=dict)
    trajectories: tuple[MethodTrajectory, ...]
    rank_by_mean_r2: tuple[str, ...] = ()
    rank_by_abs_slope: tuple[str, ...] = ()
    rank_by_fluctuation: tuple[str, ...] = ()
    composite_rank: tuple[str, ...] = ()
    composite_scores: dict[str, int] = Field(default_factory=dict)
    families: tuple[FamilySummary, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> "SensitivityReport":
        methods = sorted(t.method_id for t in self.trajectories)
        if len(set(methods)) != len(methods):
            raise ValueError("each method may appear only once")
        for name in ("rank_by_mean_r2", "rank_by_abs_slope", "rank_by_fluctuation", "composite_rank"):
            ranking = getattr(self, name)
            if ranking and sorted(ranking) != methods:
                raise ValueError(f"{name} must be a permutation of the methods")
        return self

    def trajectory(self, method_id: str) -> MethodTrajectory:
        for t in self.trajectories:
            if t.method_id == method_id:
                return t
        raise KeyError(method_id)

    def rank_of(self, method_id: str, ranking: str) -> int:
        return getattr(self, ranking).index(method_id) + 1
