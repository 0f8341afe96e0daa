# app/api/dependencies/errors.py

from fastapi import HTTPException

from app.core.exceptions import (
    DataError,
    LabError
)
from app.services.matrix import Matrix


def as_http_error(exc: LabError) -> HTTPException:
    """Map a laboratory error onto its HTTP status."""
    return HTTPException(status_code=exc.http_status, detail=str(exc))


def matrix_from_payload(rows: list[list[float]]) -> Matrix:
    """
    Raises:
        DataError: If the rows are empty or ragged.
    """
    if not rows or not rows[0] or any(len(row) != len(rows[0]) for row in rows):
        raise DataError("matrix rows must be non-empty and of equal length")
    return Matrix.from_rows(rows)
