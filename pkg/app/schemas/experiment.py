from typing import (
    Literal,
    Optional
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field
)

from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec
)
from app.schemas.types import Real

Statistic = Literal[
    "s_min",
    "s_max",
    "cond",
    "singular",
    "zero_row",
    "max_entry",
    "seginer",
    "column_distance",
    "pattern_count",
]

# Statistics whose per-trial value is an indicator; their summary carries a Wilson interval.
INDICATOR_STATISTICS = frozenset({"singular", "zero_row"})


class ExperimentSpec(BaseModel):
    """A declarative Monte-Carlo campaign."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., description="Campaign name, used for artifact file names")
    ensemble: EnsembleSpec
    trials: int = Field(..., description="Trials per sweep point")
    master_seed: int = Field(0, description="Unsigned 64-bit seed")
    statistic: Statistic = "s_min"
    condition_K: Optional[Real] = Field(
        None,
        description="Keep only trials with ||A - diag(A)|| <= K sqrt(np); inf keeps all",
    )
    sweep: Optional[list[tuple[int, float]]] = Field(
        None,
        description="(n, p) points replacing the ensemble's own n and p",
    )
    column: int = Field(0, description="Column index for column_distance")
    threshold: float = Field(1.0, description="Entry threshold for pattern_count")
    pattern_j: Optional[list[int]] = Field(None, description="J for pattern_count, default [0]")
    pattern_j_prime: Optional[list[int]] = Field(
        None,
        description="J' for pattern_count, default the next floor(sqrt(pn)) columns",
    )
    tol: float = Field(1e-10, description="Tolerance handed to the iterative spectral estimators")
    threads: int = Field(0, description="Worker threads, 0 = one per CPU")
    timings: bool = Field(False, description="Record wall time per trial, else 0")


class TrialRecord(BaseModel):
    experiment: str
    point: int = 0
    n: int
    p: float
    trial_index: int
    statistic: Statistic
    value: Real
    conditioned: bool = True
    wall_ms: float = 0.0
    error: Optional[str] = None


class SummaryStats(BaseModel):
    count: int = Field(..., description="Trials aggregated (completed and conditioned)")
    failures: int = 0
    attempted: int = 0
    mean: Optional[Real] = None
    std: Optional[Real] = None
    median: Optional[Real] = None
    quantiles: dict[str, Real] = Field(default_factory=dict, description="Keys are percent levels")
    mean_ci: Optional[tuple[Real, Real]] = Field(None, description="Student-t 95% interval for the mean")
    probability: Optional[float] = Field(None, description="Frequency, for indicator statistics")
    wilson_ci: Optional[tuple[float, float]] = None
    conditioning_frequency: Optional[float] = None
    conditioning_ci: Optional[tuple[float, float]] = None


class PointSummary(BaseModel):
    n: int
    p: float
    summary: SummaryStats


class ExperimentResult(BaseModel):
    spec: ExperimentSpec
    points: list[PointSummary]
    records: list[TrialRecord]

    @property
    def summary(self) -> SummaryStats:
        return self.points[0].summary


class TailCurvePoint(BaseModel):
    eps: Real
    probability: float
    ci: tuple[float, float]


class TailCurve(BaseModel):
    n: int
    p: float
    trials: int
    points: list[TailCurvePoint]
    fitted_C: Optional[Real] = None
    fitted_delta: Optional[Real] = None
    note: str = (
        "the eps term and the exp(-c np) term are not separately identifiable at desk "
        "scale; the reported envelope C*eps + delta is a fitted band, not a constant"
    )


class ZeroRowReport(BaseModel):
    n: int
    p: float
    trials: int
    empirical: float
    analytic: float
    ci: tuple[float, float]
    consistent: bool


class ScanReport(BaseModel):
    statistic: str
    dist: EntryDistribution
    alpha: float
    q: Real
    moment_ok: bool
    points: list[PointSummary]
    median_ratio: Real = Field(..., description="max/min of the per-point medians")
    growth_ratio: Real = Field(..., description="median at the largest n over median at the smallest")


class DistanceLemmaPoint(BaseModel):
    eps: float
    lhs: float
    lhs_ci: tuple[float, float]
    rhs: float
    rhs_ci: tuple[float, float]
    holds: bool


class DistanceLemmaReport(BaseModel):
    n: int
    p: float
    trials: int
    rho: float
    M: int
    lhs_estimator: str
    points: list[DistanceLemmaPoint]
    exact: bool = False

    @property
    def holds(self) -> bool:
        return all(point.holds for point in self.points)


class TensorizationPoint(BaseModel):
    n: int
    threshold: float
    empirical: float
    exact: float
    ci: tuple[float, float]


class TensorizationReport(BaseModel):
    q: float
    c: float
    trials: int
    points: list[TensorizationPoint]
    decays: bool


class RowSmallBallReport(BaseModel):
    p: float
    row: int
    trials: int
    radius: float
    concentration: float
    spread_ratio: float
    implied_constant: float


class LcdSmallBallPoint(BaseModel):
    eps: float
    concentration: float
    bound_shape: Real
    ratio: Real


class LcdSmallBallReport(BaseModel):
    p: float
    lcd: Real
    trials: int
    points: list[LcdSmallBallPoint]
    fitted_constant: Real
