# app/schemas/config.py

"""
config.py: Experiment Configuration Documents

A ConfigDocument is the TOML file the command line front end runs from. It has four
sections, each validated by a pydantic model that rejects unknown keys:

    [ensemble]    the matrix law (n, p, entry distribution, diagonal, shift)
    [experiment]  what to run on it (kind, statistic, trials, seed, sweeps, grids)
    [lcd]         least-common-denominator search parameters
    [output]      artifact options

Validation failures are re-raised as ConfigError carrying the dotted location
(``ensemble.p``) of every offending key. ``describe_defaults`` renders every field
with its default for ``--help``.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import (
    Literal,
    Optional,
    Union
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError
)

from app.core.exceptions import (
    ConfigError,
    LabIOError
)
from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec
)
from app.schemas.experiment import (
    ExperimentSpec,
    Statistic
)
from app.schemas.geometry import LcdParams
from app.schemas.types import Real

ExperimentKind = Literal[
    "campaign",
    "tail_curve",
    "zero_row",
    "norm_scan",
    "condition_scan",
    "distance_lemma",
]


class EnsembleSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(100, description="Matrix dimension")
    p: float = Field(0.1, description="Sparsity in [0, 1]")
    dist: Literal["rademacher", "gaussian", "pareto", "bernoulli", "constant"] = Field(
        "rademacher", description="Entry law"
    )
    rho: Optional[float] = Field(None, description="Pareto tail exponent, > 2")
    mu: Optional[float] = Field(None, description="Bernoulli mean, in (0, 1)")
    value: Optional[float] = Field(None, description="Constant entry value")
    diagonal: Literal["iid", "zero"] = Field("iid", description="Keep or zero the diagonal")
    shift: Optional[list[float]] = Field(None, description="Diagonal shift D_n, n values")
    shift_omega: Optional[float] = Field(None, description="Shift omega sqrt(np) I_n instead of an explicit list")
    adjacency_mode: bool = Field(False, description="Directed Erdos-Renyi adjacency matrix")

    def distribution(self) -> EntryDistribution:
        return EntryDistribution(kind=self.dist, rho=self.rho, mu=self.mu, value=self.value)

    def to_spec(self) -> EnsembleSpec:
        shift = self.shift
        if self.shift_omega is not None:
            if shift is not None:
                raise ConfigError("shift and shift_omega are mutually exclusive", ["ensemble.shift_omega"])
            shift = [self.shift_omega * (self.n * self.p) ** 0.5] * self.n
        return EnsembleSpec(
            n=self.n,
            p=self.p,
            dist=self.distribution(),
            diagonal=self.diagonal,
            shift=shift,
            adjacency_mode=self.adjacency_mode,
        )


class ExperimentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field("campaign", description="Artifact base name")
    kind: ExperimentKind = Field("campaign", description="What to run")
    trials: int = Field(1000, description="Trials per point")
    master_seed: int = Field(0, description="Unsigned 64-bit seed")
    statistic: Statistic = Field("s_min", description="Per-trial statistic of a campaign")
    condition_K: Optional[Real] = Field(None, description="Condition on ||A - diag(A)|| <= K sqrt(np)")
    sweep: Optional[list[tuple[int, float]]] = Field(None, description="(n, p) points")
    column: int = Field(0, description="Column for column_distance")
    threshold: float = Field(1.0, description="Entry threshold for pattern_count")
    pattern_j: Optional[list[int]] = Field(None, description="J for pattern_count")
    pattern_j_prime: Optional[list[int]] = Field(None, description="J' for pattern_count")
    tol: float = Field(1e-10, description="Iterative solver tolerance")
    threads: int = Field(0, description="Worker threads, 0 = auto")
    alpha: float = Field(0.5, description="Scans: p = n^-alpha")
    n_grid: list[int] = Field(default_factory=lambda: [100, 400, 1600], description="Scans: dimensions")
    eps_grid: list[Real] = Field(
        default_factory=lambda: [0.05, 0.1, 0.2, 0.4, 0.8],
        description="Tail curve and distance lemma levels",
    )
    rho: float = Field(0.5, description="Distance lemma incompressibility radius")
    M: Optional[int] = Field(None, description="Distance lemma sparsity level, default n // 2")


class LcdSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: Optional[float] = Field(None, description="Sparsity, defaults to ensemble.p")
    delta0: float = Field(0.1, description="LCD level delta_0")
    theta_max: Optional[float] = Field(None, description="Search cap, default 10 sqrt(n) / sqrt(delta0 p)")
    grid_step: Optional[float] = Field(None, description="Coarse grid step")


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    timings: bool = Field(False, description="Record wall time per trial (breaks byte-identical reruns)")
    archive: bool = Field(False, description="Store the campaign in the DATABASE_URL archive")


class ConfigDocument(BaseModel):
    """The four-section experiment document."""

    model_config = ConfigDict(extra="forbid")

    ensemble: EnsembleSection = Field(default_factory=EnsembleSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    lcd: LcdSection = Field(default_factory=LcdSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @classmethod
    def from_mapping(cls, data: dict) -> "ConfigDocument":
        """
        Raises:
            ConfigError: With the dotted location of every invalid or unknown key.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            locations = [".".join(str(part) for part in error["loc"]) for error in e.errors()]
            details = "; ".join(
                f"{location}: {error['msg']}" for location, error in zip(locations, e.errors())
            )
            raise ConfigError(f"invalid configuration: {details}", locations) from e

    @classmethod
    def from_toml(cls, text: str) -> "ConfigDocument":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"malformed TOML: {e}") from e
        return cls.from_mapping(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ConfigDocument":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise LabIOError(f"cannot read config {path}: {e}") from e
        return cls.from_toml(text)

    def with_overrides(
            self,
            seed: Optional[int] = None,
            threads: Optional[int] = None,
            trials: Optional[int] = None
    ) -> "ConfigDocument":
        """Apply command-line overrides; None leaves a value untouched."""
        update = {
            key: value
            for key, value in (("master_seed", seed), ("threads", threads), ("trials", trials))
            if value is not None
        }
        if not update:
            return self
        return self.model_copy(update={"experiment": self.experiment.model_copy(update=update)})

    def ensemble_spec(self) -> EnsembleSpec:
        return self.ensemble.to_spec()

    def experiment_spec(self) -> ExperimentSpec:
        e = self.experiment
        return ExperimentSpec(
            name=e.name,
            ensemble=self.ensemble_spec(),
            trials=e.trials,
            master_seed=e.master_seed,
            statistic=e.statistic,
            condition_K=e.condition_K,
            sweep=e.sweep,
            column=e.column,
            threshold=e.threshold,
            pattern_j=e.pattern_j,
            pattern_j_prime=e.pattern_j_prime,
            tol=e.tol,
            threads=e.threads,
            timings=self.output.timings,
        )

    def lcd_params(self, p: Optional[float] = None) -> LcdParams:
        section = self.lcd
        return LcdParams(
            p=p if p is not None else (section.p if section.p is not None else self.ensemble.p),
            delta0=section.delta0,
            theta_max=section.theta_max,
            grid_step=section.grid_step,
        )


def describe_defaults() -> str:
    """Every configurable key with its default, one line each, grouped by section."""
    lines = []
    for section, section_field in ConfigDocument.model_fields.items():
        lines.append(f"[{section}]")
        for name, field in section_field.annotation.model_fields.items():
            default = field.get_default(call_default_factory=True)
            comment = f"  # {field.description}" if field.description else ""
            lines.append(f"  {name} = {default!r}{comment}")
    return "\n".join(lines)
