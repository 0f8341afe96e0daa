from typing import Literal

from pydantic import (
    BaseModel,
    Field
)

from app.schemas.types import Real

SpectralMethod = Literal["full_svd", "iterative"]


class SpectralSummary(BaseModel):
    s_min: float = Field(..., ge=0.0)
    s_max: float = Field(..., ge=0.0)
    cond: Real = Field(..., description="s_max / s_min, inf when s_min = 0")
    method: SpectralMethod
    residual: float = Field(..., description="Relative backward-error estimate")
    tolerance: float
    singular: bool = Field(False, description="s_min below the numerical singularity threshold")


class MatrixPayload(BaseModel):
    rows: list[list[float]] = Field(..., description="Dense row-major entries")


class SpectralRequest(MatrixPayload):
    method: SpectralMethod = "iterative"
    tol: float = 1e-10


class NormQuantities(BaseModel):
    seginer: float = Field(..., description="Largest column Euclidean norm")
    sigma1: float = Field(..., description="Largest row Euclidean norm")
    sigma2: float = Field(..., description="Largest column Euclidean norm")
    sigma_star: float = Field(..., description="Largest absolute entry")
    bvh_bound: Real = Field(..., description="Norm bound at the requested eps")


class NormRequest(MatrixPayload):
    eps: float = 0.5
