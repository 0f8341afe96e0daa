"""
app/api/routers/v1/geometry.py

Vector geometry endpoints: the grid-certified LCD, the sphere decomposition at a
sparsity level, and the threshold constants of the compressibility argument.
"""

from fastapi import APIRouter

from app.api.dependencies import as_http_error
from app.core.exceptions import LabError
from app.schemas.geometry import (
    ClassifyRequest,
    LcdReport,
    LcdRequest,
    ThresholdParams,
    ThresholdRequest,
    VectorClass
)
from app.services.geometry import (
    classify_vector,
    coerce_unit_vector,
    lcd_report,
    threshold_params
)

router = APIRouter()


@router.post("/lcd", response_model=LcdReport)
def lcd(request: LcdRequest) -> LcdReport:
    """
    Grid-certified LCD of a unit vector; norms within 1e-6 of 1 are re-normalised.

    Args:
        request (LcdRequest): The vector and the LCD parameters p and delta0.

    Returns:
        LcdReport: The LCD ("inf" when no grid point qualifies), its lower bounds and the grid used.

    Raises:
        HTTPException: 422 when the vector is not unit within 1e-6 or the parameters are invalid.
    """
    try:
        return lcd_report(coerce_unit_vector(request.vector), request.params)
    except LabError as e:
        raise as_http_error(e)


@router.post("/classify", response_model=VectorClass)
def classify(request: ClassifyRequest) -> VectorClass:
    """
    Place a vector in the sphere decomposition at sparsity level ``m``.

    Args:
        request (ClassifyRequest): The vector, the level m, the radius rho and the tail parameter alpha.

    Returns:
        VectorClass: Compressible and dominated flags with the distances behind them.

    Raises:
        HTTPException: 422 when the vector is not unit within 1e-6 or m lies outside [1, n].
    """
    try:
        x = coerce_unit_vector(request.vector)
        return classify_vector(x, request.m, request.rho, request.alpha)
    except LabError as e:
        raise as_http_error(e)


@router.post("/threshold-params", response_model=ThresholdParams)
def thresholds(request: ThresholdRequest) -> ThresholdParams:
    """
    Derived constants of the compressibility argument.

    Args:
        request (ThresholdRequest): Moment bound K, diagonal bound R, density p, size n and c_tilde.

    Returns:
        ThresholdParams: ell0, rho, the dominated-tail alpha and the admissible level range.

    Raises:
        HTTPException: 422 when the parameters are out of range.
    """
    try:
        return threshold_params(request.K, request.R, request.p, request.n, request.c_tilde)
    except LabError as e:
        raise as_http_error(e)
