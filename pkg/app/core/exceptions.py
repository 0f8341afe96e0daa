# app/core/exceptions.py

"""
exceptions.py: Laboratory Error Hierarchy

Every error raised on purpose by the laboratory derives from LabError. Each class
carries the process exit code used by the command line front end and the HTTP
status used by the FastAPI routers, so both surfaces triage failures the same way:

    0  success
    2  validation (parameters, shapes, domains, data, configuration)
    3  I/O
    4  numerical non-convergence
"""

from typing import Optional


class LabError(Exception):
    """Base class for all laboratory errors."""

    exit_code: int = 1
    http_status: int = 500


class ParameterError(LabError, ValueError):
    """A numeric parameter or index set is outside its admissible range."""

    exit_code = 2
    http_status = 422


class ShapeError(ParameterError):
    """A matrix does not have the shape an operation requires."""


class DomainError(ParameterError):
    """A closed-form quantity is evaluated outside the domain of its formula."""


class DataError(LabError, ValueError):
    """Input data is unusable: non-finite entries, non-unit vectors and similar."""

    exit_code = 2
    http_status = 422


class MatrixFormatError(DataError):
    """A matrix or vector file cannot be parsed.

    Args:
        message: What went wrong.
        line: 1-based line number of the offending line, when known.
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(LabError, ValueError):
    """A configuration document failed validation.

    Args:
        message: Summary of the failure.
        locations: Dotted key paths (``ensemble.p``) of every offending entry.
    """

    exit_code = 2
    http_status = 422

    def __init__(self, message: str, locations: Optional[list[str]] = None) -> None:
        self.locations = locations or []
        super().__init__(message)


class LabIOError(LabError, OSError):
    """Reading or writing an artifact failed."""

    exit_code = 3
    http_status = 500


class NonConvergenceError(LabError, ArithmeticError):
    """An iterative solver exhausted its sweep budget."""

    exit_code = 4
    http_status = 500
