from app.services.matrix import Matrix
from app.services.ensemble import (
    sample_matrix,
    sample_matrix_sparse,
    sample_directed_er
)
from app.services.spectral import (
    smallest_singular_value,
    largest_singular_value,
    condition_number,
    spectral_summary
)
from app.services.geometry import (
    UnitVector,
    lcd
)
from app.services.montecarlo import run_experiment

__all__ = [
    "Matrix",
    "sample_matrix",
    "sample_matrix_sparse",
    "sample_directed_er",
    "smallest_singular_value",
    "largest_singular_value",
    "condition_number",
    "spectral_summary",
    "UnitVector",
    "lcd",
    "run_experiment",
]
