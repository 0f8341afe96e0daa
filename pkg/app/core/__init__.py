from .config import settings
from .exceptions import (
    LabError,
    ParameterError,
    ShapeError,
    DomainError,
    DataError,
    MatrixFormatError,
    ConfigError,
    LabIOError,
    NonConvergenceError
)

__all__ = [
    'settings',
    'LabError',
    'ParameterError',
    'ShapeError',
    'DomainError',
    'DataError',
    'MatrixFormatError',
    'ConfigError',
    'LabIOError',
    'NonConvergenceError'
]
