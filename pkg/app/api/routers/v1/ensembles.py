"""
app/api/routers/v1/ensembles.py

Sampling endpoint: an EnsembleSpec and a seed in, the sampled matrix out as
coordinate entries in row-major order.
"""

from fastapi import APIRouter

from app.api.dependencies import as_http_error
from app.core.exceptions import LabError
from app.schemas.ensemble import (
    CoordinateEntry,
    SampledMatrix,
    SampleRequest
)
from app.services.ensemble import sample_matrix

router = APIRouter()


@router.post("/sample", response_model=SampledMatrix)
def sample(request: SampleRequest) -> SampledMatrix:
    """
    Sample one matrix of the ensemble.

    Args:
        request (SampleRequest): The ensemble and the (master_seed, trial_index) pair.

    Returns:
        SampledMatrix: Shape, nnz and the nonzero entries in row-major order.

    Raises:
        HTTPException: 422 when the ensemble parameters are invalid.
    """
    try:
        m = sample_matrix(request.ensemble, request.seed)
    except LabError as e:
        raise as_http_error(e)
    view = m.sparse_view.tocoo()
    entries = [
        CoordinateEntry(row=int(i), col=int(j), value=float(v))
        for i, j, v in zip(view.row, view.col, view.data)
    ]
    entries.sort(key=lambda entry: (entry.row, entry.col))
    return SampledMatrix(rows=m.rows, cols=m.cols, nnz=len(entries), entries=entries)
