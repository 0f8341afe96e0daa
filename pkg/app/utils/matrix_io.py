# app/utils/matrix_io.py

"""
Text formats for matrices and vectors.

Matrices use the MatrixMarket coordinate layout::

    %%MatrixMarket matrix coordinate real general
    rows cols nnz
    i j value        (1-based, one line per nonzero, row-major order)

Vectors hold one value per line. Values are written with 17 significant digits,
which round-trips every IEEE double. Readers accept arbitrary whitespace, blank
lines and ``%`` comment lines, and report the 1-based line of any defect.
"""

import logging
import math
from pathlib import Path
from typing import (
    Iterator,
    Union
)

import numpy as np
from scipy import sparse

from app.core.exceptions import (
    LabIOError,
    MatrixFormatError
)
from app.services.matrix import Matrix

logger = logging.getLogger(__name__)

MATRIX_HEADER = "%%MatrixMarket matrix coordinate real general"

PathLike = Union[str, Path]


def format_real(value: float) -> str:
    return format(float(value), ".17g")


def _write_text(path: PathLike, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error("Failed to write %s: %s", path, e)
        raise LabIOError(f"cannot write {path}: {e}") from e


def _read_lines(path: PathLike) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        logger.error("Failed to read %s: %s", path, e)
        raise LabIOError(f"cannot read {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise MatrixFormatError(f"{path} is not UTF-8 text") from e


def matrix_to_text(m: Matrix) -> str:
    view = m.sparse_view.tocoo()
    lines = [MATRIX_HEADER, f"{m.rows} {m.cols} {view.nnz}"]
    lines.extend(
        f"{i + 1} {j + 1} {format_real(v)}"
        for i, j, v in zip(view.row.tolist(), view.col.tolist(), view.data.tolist())
    )
    return "\n".join(lines) + "\n"


def write_matrix(m: Matrix, path: PathLike) -> None:
    """Write ``m`` in coordinate format; byte-identical for identical matrices."""
    _write_text(path, matrix_to_text(m))
    logger.info("Wrote %dx%d matrix with %d nonzeros to %s", m.rows, m.cols, m.nnz, path)


def _content(lines: list[str]) -> Iterator[tuple[int, list[str]]]:
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("%"):
            yield number, stripped.split()


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise MatrixFormatError(f"{what} {token!r} is not an integer", line) from None


def _parse_real(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MatrixFormatError(f"value {token!r} is not a real number", line) from None
    if not math.isfinite(value):
        raise MatrixFormatError(f"value {token!r} is not finite", line)
    return value


def matrix_from_text(text: str) -> Matrix:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise MatrixFormatError("missing %%MatrixMarket header", 1)
    header = lines[0].lower().split()
    if "coordinate" not in header or "real" not in header or "general" not in header:
        raise MatrixFormatError("only 'coordinate real general' matrices are supported", 1)

    content = _content(lines)
    try:
        size_line, size_tokens = next(content)
    except StopIteration:
        raise MatrixFormatError("missing size line", len(lines) + 1) from None
    if len(size_tokens) != 3:
        raise MatrixFormatError("size line must read 'rows cols nnz'", size_line)
    rows, cols, nnz = (_parse_int(t, size_line, "size") for t in size_tokens)
    if rows < 0 or cols < 0 or nnz < 0:
        raise MatrixFormatError("sizes must be non-negative", size_line)

    row_idx, col_idx, values = [], [], []
    seen: set[tuple[int, int]] = set()
    for number, tokens in content:
        if len(tokens) != 3:
            raise MatrixFormatError(f"expected 'i j value', got {len(tokens)} token(s)", number)
        i = _parse_int(tokens[0], number, "row index")
        j = _parse_int(tokens[1], number, "column index")
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixFormatError(f"index ({i}, {j}) outside {rows}x{cols}", number)
        if (i, j) in seen:
            raise MatrixFormatError(f"duplicate entry ({i}, {j})", number)
        seen.add((i, j))
        row_idx.append(i - 1)
        col_idx.append(j - 1)
        values.append(_parse_real(tokens[2], number))

    if len(values) != nnz:
        raise MatrixFormatError(f"size line declares {nnz} entries, found {len(values)}", size_line)
    csr = sparse.csr_matrix(
        (np.asarray(values, dtype=np.float64), (np.asarray(row_idx, dtype=np.int64), np.asarray(col_idx, dtype=np.int64))),
        shape=(rows, cols)
    )
    return Matrix(csr=csr)


def read_matrix(path: PathLike) -> Matrix:
    """Read a coordinate-format matrix.

    Raises:
        LabIOError: If the file cannot be read.
        MatrixFormatError: On any syntax or consistency defect, citing its line.
    """
    return matrix_from_text("\n".join(_read_lines(path)))


def declared_nnz(path: PathLike) -> int:
    """The nnz field of a matrix file's size line."""
    for number, tokens in _content(_read_lines(path)):
        if len(tokens) != 3:
            raise MatrixFormatError("size line must read 'rows cols nnz'", number)
        return _parse_int(tokens[2], number, "size")
    raise MatrixFormatError("missing size line")


def write_vector(values, path: PathLike) -> None:
    _write_text(path, "".join(f"{format_real(v)}\n" for v in np.asarray(values, dtype=np.float64).ravel()))


def read_vector(path: PathLike) -> np.ndarray:
    values = []
    for number, tokens in _content(_read_lines(path)):
        if len(tokens) != 1:
            raise MatrixFormatError(f"expected one value per line, got {len(tokens)}", number)
        values.append(_parse_real(tokens[0], number))
    if not values:
        raise MatrixFormatError("vector file holds no values")
    return np.asarray(values, dtype=np.float64)
