from typing import Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field
)

from app.schemas.types import Real


class LcdParams(BaseModel):
    """Search parameters of the least common denominator.

    ``theta_max`` and ``grid_step`` may be left unset; they then resolve against
    the vector dimension (see app.services.geometry.resolve_lcd_params).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(..., description="Sparsity in (0, 1]")
    delta0: float = Field(0.1, description="LCD level delta_0 in (0, 1)")
    theta_max: Optional[float] = Field(None, description="Search cap, default 10 sqrt(n) / sqrt(delta0 p)")
    grid_step: Optional[float] = Field(None, description="Coarse grid step, at most 1e-3 theta_max")


class LcdLowerBounds(BaseModel):
    universal: float = Field(..., description="(delta0 p)^(-1/2)")
    sup_norm: Real = Field(..., description="1 / (2 ||x||_inf)")


class LcdReport(BaseModel):
    lcd: Real
    lower_bounds: LcdLowerBounds
    theta_max: float
    grid_step: float
    grid_points: int = Field(..., description="Coarse grid points evaluated")
    params: LcdParams


class LcdRequest(BaseModel):
    vector: list[float]
    params: LcdParams


class ThresholdParams(BaseModel):
    K: float
    R: float
    p: float
    n: int
    c_tilde: float
    ell0: int
    rho: float
    c_dom: float
    alpha_dom: float = Field(..., description="Dominated-tail parameter (c_dom (K + R))^-4")
    c_m: float
    m_min: int = Field(..., description="Smallest admissible compressibility level, ceil(1/p)")
    m_max: int = Field(..., description="Largest admissible compressibility level, floor(c_m n)")


class ThresholdRequest(BaseModel):
    K: float = 1.0
    R: float = 1.0
    p: float
    n: int
    c_tilde: float = 2.0


class VectorClass(BaseModel):
    m: int
    compressible: bool
    incompressible: bool
    dominated: bool
    dist_to_sparse: float
    tail_l2: float
    tail_sup: float


class ClassifyRequest(BaseModel):
    vector: list[float]
    m: int
    rho: float
    alpha: float
