from app.api.dependencies.errors import (
    as_http_error,
    matrix_from_payload
)

__all__ = [
    "as_http_error",
    "matrix_from_payload",
]
