"""
app/api/routers/v1/spectral.py

Spectral endpoints over dense matrices sent as row lists:

- POST /summary: extreme singular values, condition number and residual.
- POST /norms: the row/column/entry maxima behind the sparse norm bounds.
"""

from fastapi import APIRouter

from app.api.dependencies import (
    as_http_error,
    matrix_from_payload
)
from app.core.exceptions import LabError
from app.schemas.spectral import (
    NormQuantities,
    NormRequest,
    SpectralRequest,
    SpectralSummary
)
from app.services.spectral import (
    norm_quantities,
    spectral_summary
)

router = APIRouter()


@router.post("/summary", response_model=SpectralSummary)
def summary(request: SpectralRequest) -> SpectralSummary:
    """
    Spectral summary of a dense matrix.

    Args:
        request (SpectralRequest): Row-major entries, the method and its tolerance.

    Returns:
        SpectralSummary: s_min, s_max, cond ("inf" when singular) and the residual.

    Raises:
        HTTPException: 422 on empty, ragged or non-finite rows.
    """
    try:
        m = matrix_from_payload(request.rows)
        m.require_finite()
        return spectral_summary(m, request.method, request.tol)
    except LabError as e:
        raise as_http_error(e)


@router.post("/norms", response_model=NormQuantities)
def norms(request: NormRequest) -> NormQuantities:
    """
    Row, column and entry maxima of a dense matrix with the norm bound at ``eps``.

    Args:
        request (NormRequest): Row-major entries and the bound's eps.

    Returns:
        NormQuantities: seginer, sigma1, sigma2, sigma_star and bvh_bound.

    Raises:
        HTTPException: 422 on empty, ragged or non-finite rows, or eps <= 0.
    """
    try:
        m = matrix_from_payload(request.rows)
        m.require_finite()
        return norm_quantities(m, request.eps)
    except LabError as e:
        raise as_http_error(e)
