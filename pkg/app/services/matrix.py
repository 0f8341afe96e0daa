# app/services/matrix.py

"""
Immutable real matrix carrier.

A Matrix holds either a dense row-major array, a compressed sparse row (CSR)
array, or both. The missing representation is built on first access and cached;
both describe exactly the same entries. Arrays handed out are read-only, so a
Matrix can be shared freely between worker threads.
"""

from functools import cached_property
from typing import Optional

import numpy as np
from scipy import sparse

from app.core.exceptions import (
    DataError,
    ShapeError
)


class Matrix:
    def __init__(
            self,
            dense: Optional[np.ndarray] = None,
            csr: Optional[sparse.csr_matrix] = None
    ) -> None:
        if dense is None and csr is None:
            raise ShapeError("a Matrix needs dense or sparse storage")
        if dense is not None:
            dense = np.array(dense, dtype=np.float64, order="C")
            if dense.ndim != 2:
                raise ShapeError(f"expected a 2-D array, got {dense.ndim} dimension(s)")
            dense.setflags(write=False)
            self.__dict__["dense"] = dense
            self.shape: tuple[int, int] = dense.shape
        if csr is not None:
            csr = sparse.csr_matrix(csr, dtype=np.float64, copy=True)
            csr.sum_duplicates()
            csr.eliminate_zeros()
            for array in (csr.data, csr.indices, csr.indptr):
                array.setflags(write=False)
            self.__dict__["sparse_view"] = csr
            self.shape = csr.shape

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        return cls(dense=np.asarray(rows, dtype=np.float64))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(dense=np.eye(n))

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @cached_property
    def dense(self) -> np.ndarray:
        array = self.sparse_view.toarray()
        array.setflags(write=False)
        return array

    @cached_property
    def sparse_view(self) -> sparse.csr_matrix:
        view = sparse.csr_matrix(self.dense)
        view.eliminate_zeros()
        view.sort_indices()
        for array in (view.data, view.indices, view.indptr):
            array.setflags(write=False)
        return view

    @property
    def has_dense(self) -> bool:
        return "dense" in self.__dict__

    def operator(self):
        """The cheapest representation to multiply with."""
        return self.dense if self.has_dense else self.sparse_view

    def csr_triple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(row_ptr, col_idx, values)`` of the sparse view."""
        view = self.sparse_view
        return view.indptr, view.indices, view.data

    @property
    def nnz(self) -> int:
        return int(self.sparse_view.nnz)

    def frobenius_norm(self) -> float:
        if self.has_dense:
            return float(np.linalg.norm(self.dense))
        return float(np.linalg.norm(self.sparse_view.data))

    def is_finite(self) -> bool:
        values = self.dense if self.has_dense else self.sparse_view.data
        return bool(np.all(np.isfinite(values)))

    def require_finite(self) -> None:
        if not self.is_finite():
            raise DataError("matrix contains non-finite entries")

    def require_square(self) -> None:
        if not self.is_square:
            raise ShapeError(f"expected a square matrix, got {self.rows}x{self.cols}")

    def transpose(self) -> "Matrix":
        if self.has_dense:
            return Matrix(dense=self.dense.T)
        return Matrix(csr=self.sparse_view.T.tocsr())

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.operator() @ np.asarray(x, dtype=np.float64)).ravel()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        difference = self.sparse_view != other.sparse_view
        return difference.nnz == 0

    __hash__ = None

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz})"
