from typing import (
    Literal,
    Optional
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field
)

DistributionKind = Literal["rademacher", "gaussian", "pareto", "bernoulli", "constant"]
DiagonalPolicy = Literal["iid", "zero"]


class EntryDistribution(BaseModel):
    """Law of the entry variables xi_ij.

    Only the parameter belonging to ``kind`` is read: ``rho`` for the symmetric
    Pareto law, ``mu`` for the shifted Bernoulli law and ``value`` for constants.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: DistributionKind = Field("rademacher", description="Entry law")
    rho: Optional[float] = Field(None, description="Pareto tail exponent, must exceed 2")
    mu: Optional[float] = Field(None, description="Bernoulli mean in (0, 1)")
    value: Optional[float] = Field(None, description="Constant entry value")

    @classmethod
    def rademacher(cls) -> "EntryDistribution":
        return cls(kind="rademacher")

    @classmethod
    def gaussian(cls) -> "EntryDistribution":
        return cls(kind="gaussian")

    @classmethod
    def pareto(cls, rho: float) -> "EntryDistribution":
        return cls(kind="pareto", rho=rho)

    @classmethod
    def bernoulli(cls, mu: float) -> "EntryDistribution":
        return cls(kind="bernoulli", mu=mu)

    @classmethod
    def constant(cls, value: float) -> "EntryDistribution":
        return cls(kind="constant", value=value)

    @property
    def is_centered(self) -> bool:
        return self.kind in ("rademacher", "gaussian", "pareto") or (
            self.kind == "constant" and self.value == 0.0
        )

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("rademacher", "bernoulli", "constant")


class EnsembleSpec(BaseModel):
    """Full description of a sparse random matrix law."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(..., description="Matrix dimension")
    p: float = Field(..., description="Probability that an entry survives the Bernoulli mask")
    dist: EntryDistribution = Field(default_factory=EntryDistribution.rademacher)
    diagonal: DiagonalPolicy = Field("iid", description="iid diagonal, or forced to zero")
    shift: Optional[list[float]] = Field(
        None,
        description="Diagonal shift D_n added after sampling; omitted means the zero shift",
    )
    adjacency_mode: bool = Field(
        False,
        description="Raw directed Erdos-Renyi edges: Bernoulli(p) entries, zero diagonal, no mask",
    )

    @property
    def shift_sup_norm(self) -> float:
        return max((abs(v) for v in self.shift), default=0.0) if self.shift else 0.0


class SeedSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    master_seed: int = Field(..., description="Unsigned 64-bit campaign seed")
    trial_index: int = Field(0, description="Trial counter, selects an independent stream")


class SampleRequest(BaseModel):
    ensemble: EnsembleSpec
    seed: SeedSpec


class CoordinateEntry(BaseModel):
    row: int
    col: int
    value: float


class SampledMatrix(BaseModel):
    rows: int
    cols: int
    nnz: int
    entries: list[CoordinateEntry]
