# app/services/spectral.py

"""
spectral.py: Extreme Singular Values and Norm Quantities

This module computes singular values of Matrix instances, from an oracle-grade
dense SVD down to the fast estimators the Monte-Carlo harness runs per trial.

Main Components:
- jacobi_svd: one-sided (Hestenes) Jacobi SVD with round-robin pair ordering. It
  is the reference path; it resolves tiny singular values to high relative
  accuracy.
- golub_kahan_singular_values: an independently coded oracle. Householder
  bidiagonalisation followed by the eigenvalues of the symmetric tridiagonal
  Golub-Kahan form.
- smallest_singular_value: inverse iteration on A^T A through one LU
  factorisation, falling back to jacobi_svd when the iteration stalls.
- largest_singular_value: ARPACK Lanczos (scipy.sparse.linalg.svds), which works
  on both dense and CSR storage.
- column_span_distance, seginer_column_stat, bvh_sigmas: the auxiliary norm
  quantities.

Non-square inputs are supported everywhere except condition_number; s_min then
means the smallest of the min(rows, cols) singular values.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import (
    Literal,
    Optional
)

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import svds

from app.core.config import settings
from app.core.exceptions import (
    NonConvergenceError,
    ParameterError,
    ShapeError
)
from app.schemas.spectral import (
    NormQuantities,
    SpectralSummary
)
from app.services.matrix import Matrix
from app.utils.exact_rank import exact_rank as _exact_rank

logger = logging.getLogger(__name__)

# Residual bound that full_svd_singular_values guarantees, relative to s_1^2.
FULL_SVD_RTOL = 1e-10
# Below this dimension ARPACK is skipped in favour of the dense Jacobi SVD.
ARPACK_MIN_DIM = 16
# Column distances at or below this fraction of ||m||_F count as zero.
SPAN_RTOL = 1e-10


@dataclass(frozen=True)
class JacobiResult:
    """Output of jacobi_svd.

    ``vectors`` holds right singular vectors (as columns) of the matrix the
    rotations ran on: m itself, or its transpose when m is wide (``transposed``).
    """

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int
    residual: float
    transposed: bool


@dataclass(frozen=True)
class SminEstimate:
    value: float
    singular: bool
    method: Literal["full_svd", "iterative"]
    iterations: int
    residual: float


def _start_vector(n: int) -> np.ndarray:
    x = np.random.default_rng(0x5EED).standard_normal(n)
    return x / np.linalg.norm(x)


def _round_robin(k: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of k (even) columns such that each round touches every column once."""
    players = list(range(k))
    rounds = []
    for _ in range(k - 1):
        rounds.append((np.array(players[:k // 2]), np.array(players[k // 2:][::-1])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _oriented(m: Matrix) -> tuple[np.ndarray, bool]:
    m.require_finite()
    a = m.dense
    if a.shape[0] < a.shape[1]:
        return a.T, True
    return a, False


def _triangular_core(a: np.ndarray) -> np.ndarray:
    """Square matrix with the singular values of a tall ``a``."""
    rows, cols = a.shape
    if rows == cols:
        return np.array(a, dtype=np.float64)
    return linalg.qr(a, mode="r", check_finite=False)[0][:cols]


def jacobi_svd(m: Matrix, max_sweeps: Optional[int] = None) -> JacobiResult:
    """One-sided Jacobi SVD.

    Args:
        m: Finite matrix of any shape.
        max_sweeps: Sweep budget, defaults to settings.LAB_MAX_JACOBI_SWEEPS.

    Returns:
        JacobiResult with min(rows, cols) non-increasing singular values.

    Raises:
        DataError: If m has non-finite entries.
        NonConvergenceError: If the columns are not orthogonal after max_sweeps.
    """
    max_sweeps = max_sweeps or settings.LAB_MAX_JACOBI_SWEEPS
    a, transposed = _oriented(m)
    cols = a.shape[1]
    if cols == 0:
        return JacobiResult(np.zeros(0), np.zeros((0, 0)), 0, 0.0, transposed)

    w = _triangular_core(a)
    k = cols + cols % 2
    if k != cols:
        w = np.hstack([w, np.zeros((w.shape[0], 1))])
    v = np.eye(k)
    tol = max(w.shape[0], 1) * np.finfo(np.float64).eps
    rounds = _round_robin(k)

    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for top, bottom in rounds:
            wp, wq = w[:, top], w[:, bottom]
            alpha = np.einsum("ij,ij->j", wp, wp)
            beta = np.einsum("ij,ij->j", wq, wq)
            gamma = np.einsum("ij,ij->j", wp, wq)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            zeta = np.divide(beta - alpha, 2.0 * gamma, out=np.zeros_like(gamma), where=active)
            t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(active, c * t, 0.0)
            w[:, top], w[:, bottom] = c * wp - s * wq, s * wp + c * wq
            vp, vq = v[:, top], v[:, bottom]
            v[:, top], v[:, bottom] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    else:
        raise NonConvergenceError(f"Jacobi SVD not converged after {max_sweeps} sweeps")

    values = np.linalg.norm(w[:, :cols], axis=0)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:cols, :cols][:, order]

    gram = a.T @ a
    s1_squared = values[0] ** 2
    defect = gram @ vectors - vectors * values ** 2
    residual = float(np.max(np.linalg.norm(defect, axis=0)) / s1_squared) if s1_squared > 0 else 0.0
    logger.debug("Jacobi SVD of %dx%d converged in %d sweeps", m.rows, m.cols, sweep)
    return JacobiResult(values, vectors, sweep, residual, transposed)


def full_svd_singular_values(m: Matrix) -> list[float]:
    """All min(rows, cols) singular values, non-increasing, from the Jacobi SVD."""
    return jacobi_svd(m).values.tolist()


def _householder_vector(x: np.ndarray) -> tuple[np.ndarray, float]:
    norm = np.linalg.norm(x)
    v = np.array(x, dtype=np.float64)
    if norm == 0.0:
        return v, 0.0
    v[0] += np.copysign(norm, x[0])
    vv = float(v @ v)
    return v, (2.0 / vv if vv > 0.0 else 0.0)


def householder_bidiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and superdiagonal of an upper bidiagonal B with the singular values of ``a``.

    ``a`` must have at least as many rows as columns.
    """
    b = np.array(a, dtype=np.float64)
    rows, cols = b.shape
    d = np.zeros(cols)
    e = np.zeros(max(cols - 1, 0))
    for k in range(cols):
        v, beta = _householder_vector(b[k:, k])
        if beta:
            b[k:, k:] -= beta * np.outer(v, v @ b[k:, k:])
        d[k] = b[k, k]
        if k < cols - 1:
            v, beta = _householder_vector(b[k, k + 1:])
            if beta:
                b[k:, k + 1:] -= beta * np.outer(b[k:, k + 1:] @ v, v)
            e[k] = b[k, k + 1]
    return d, e


def golub_kahan_singular_values(m: Matrix) -> list[float]:
    """Singular values from the 2n x 2n Golub-Kahan tridiagonal form, non-increasing."""
    a, _ = _oriented(m)
    d, e = householder_bidiagonalize(a)
    n = d.size
    if n == 0:
        return []
    off_diagonal = np.empty(2 * n - 1)
    off_diagonal[0::2] = d
    off_diagonal[1::2] = e
    eigenvalues = linalg.eigvalsh_tridiagonal(np.zeros(2 * n), off_diagonal)
    return np.clip(eigenvalues[n:][::-1], 0.0, None).tolist()


def largest_singular_value(m: Matrix, tol: float = 1e-10) -> float:
    """Operator norm by Lanczos iteration; 0 for the zero matrix.

    Small matrices go through the Jacobi SVD instead.
    """
    m.require_finite()
    if min(m.shape) == 0 or m.nnz == 0:
        return 0.0
    if min(m.shape) < ARPACK_MIN_DIM:
        return float(jacobi_svd(m).values[0])
    values = svds(
        m.operator(),
        k=1,
        tol=tol,
        v0=_start_vector(min(m.shape)),
        return_singular_vectors=False,
        solver="arpack"
    )
    return float(values[0])


def singular_threshold(s_max: float) -> float:
    return settings.LAB_SINGULAR_RTOL * max(1.0, s_max)


def _smin_from_full(a: np.ndarray, s_max: float, iterations: int) -> SminEstimate:
    result = jacobi_svd(Matrix(dense=a))
    value = float(result.values[-1])
    if value <= singular_threshold(s_max):
        return SminEstimate(0.0, True, "full_svd", iterations, result.residual)
    return SminEstimate(value, False, "full_svd", iterations, result.residual)


def smallest_singular_estimate(
        m: Matrix,
        tol: float = 1e-10,
        s_max: Optional[float] = None
) -> SminEstimate:
    """Smallest singular value with diagnostics.

    Inverse iteration runs until ||A^T u - s x|| <= tol * s_max for u = Ax / s.
    Matrices whose s_min falls below LAB_SINGULAR_RTOL * max(1, s_max) are reported
    as value 0 with ``singular`` set.
    """
    a, _ = _oriented(m)
    if a.shape[1] == 0:
        raise ShapeError("matrix has no singular values")
    if s_max is None:
        s_max = largest_singular_value(m)
    if s_max == 0.0:
        return SminEstimate(0.0, True, "iterative", 0, 0.0)

    core = _triangular_core(a)
    threshold = singular_threshold(s_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu_and_piv = linalg.lu_factor(core, check_finite=False)
    if np.any(np.diag(lu_and_piv[0]) == 0.0):
        logger.debug("zero pivot in LU factorisation, using the full SVD")
        return _smin_from_full(core, s_max, 0)

    max_sweeps = settings.LAB_MAX_INVERSE_SWEEPS
    x = _start_vector(core.shape[0])
    for iteration in range(1, max_sweeps + 1):
        y = linalg.lu_solve(lu_and_piv, x, trans=1, check_finite=False)
        z = linalg.lu_solve(lu_and_piv, y, check_finite=False)
        norm_z = np.linalg.norm(z)
        if not np.isfinite(norm_z) or norm_z == 0.0:
            return _smin_from_full(core, s_max, iteration)
        x = z / norm_z
        ax = core @ x
        s = float(np.linalg.norm(ax))
        if s <= threshold:
            return SminEstimate(0.0, True, "iterative", iteration, 0.0)
        defect = float(np.linalg.norm(core.T @ (ax / s) - s * x))
        if defect <= tol * s_max:
            return SminEstimate(s, False, "iterative", iteration, defect / s_max)

    logger.info("Inverse iteration stalled after %d sweeps, falling back to the full SVD", max_sweeps)
    return _smin_from_full(core, s_max, max_sweeps)


def smallest_singular_value(m: Matrix, tol: float = 1e-10) -> float:
    """s_min within tol * s_max; 0 for matrices singular to working precision."""
    return smallest_singular_estimate(m, tol).value


def is_numerically_singular(m: Matrix, tol: float = 1e-10) -> bool:
    return smallest_singular_estimate(m, tol).singular


def exact_rank(m: Matrix) -> int:
    """Rank over the rationals of the stored double values."""
    m.require_finite()
    return _exact_rank(m.dense)


def _ratio(s_max: float, s_min: float) -> float:
    if s_min == 0.0:
        return float("inf")
    return max(1.0, s_max / s_min)


def condition_number(m: Matrix, tol: float = 1e-10) -> float:
    """s_max / s_min, +inf for singular matrices.

    Raises:
        ShapeError: If m is not square.
    """
    m.require_square()
    s_max = largest_singular_value(m, tol)
    return _ratio(s_max, smallest_singular_estimate(m, tol, s_max).value)


def spectral_summary(
        m: Matrix,
        method: Literal["full_svd", "iterative"] = "iterative",
        tol: float = 1e-10
) -> SpectralSummary:
    """Both extreme singular values, the condition number and a residual.

    ``method="full_svd"`` reads everything off the Jacobi SVD. ``"iterative"`` uses
    Lanczos for s_max and inverse iteration for s_min; the reported method is
    ``full_svd`` when inverse iteration had to fall back.
    """
    if method == "full_svd":
        result = jacobi_svd(m)
        if result.values.size == 0:
            raise ShapeError("matrix has no singular values")
        s_max = float(result.values[0])
        s_min = float(result.values[-1])
        singular = s_min <= singular_threshold(s_max)
        if singular:
            s_min = 0.0
        return SpectralSummary(
            s_min=s_min,
            s_max=s_max,
            cond=_ratio(s_max, s_min),
            method="full_svd",
            residual=result.residual,
            tolerance=FULL_SVD_RTOL,
            singular=singular,
        )
    if method != "iterative":
        raise ParameterError(f"unknown spectral method {method!r}")

    s_max = largest_singular_value(m, tol)
    estimate = smallest_singular_estimate(m, tol, s_max)
    s_max = max(s_max, estimate.value)
    return SpectralSummary(
        s_min=estimate.value,
        s_max=s_max,
        cond=_ratio(s_max, estimate.value),
        method=estimate.method,
        residual=estimate.residual,
        tolerance=FULL_SVD_RTOL if estimate.method == "full_svd" else tol,
        singular=estimate.singular,
    )


def column_span_distance(m: Matrix, j: int) -> float:
    """Distance from column j to the span of the other columns, by least squares.

    Raises:
        ShapeError: If m is not square or n < 2.
        ParameterError: If j is not a column index.
    """
    m.require_square()
    m.require_finite()
    if m.cols < 2:
        raise ShapeError("column_span_distance needs n >= 2")
    if not 0 <= j < m.cols:
        raise ParameterError(f"column {j} outside [0, {m.cols})")
    a = m.dense
    column = a[:, j]
    rest = np.delete(a, j, axis=1)
    coefficients = linalg.lstsq(rest, column, check_finite=False)[0]
    distance = float(np.linalg.norm(column - rest @ coefficients))
    return 0.0 if distance <= SPAN_RTOL * m.frobenius_norm() else distance


def column_span_distances(m: Matrix) -> np.ndarray:
    """All column-to-span distances.

    For invertible m, dist_j = 1 / ||row j of m^-1||; otherwise each column goes
    through column_span_distance.
    """
    m.require_square()
    estimate = smallest_singular_estimate(m)
    if not estimate.singular:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            inverse = linalg.inv(m.dense, check_finite=False)
        if np.all(np.isfinite(inverse)):
            return 1.0 / np.linalg.norm(inverse, axis=1)
    return np.array([column_span_distance(m, j) for j in range(m.cols)])


def _column_norms(m: Matrix) -> np.ndarray:
    if m.has_dense:
        return np.linalg.norm(m.dense, axis=0)
    view = m.sparse_view
    return np.sqrt(np.asarray(view.multiply(view).sum(axis=0)).ravel())


def _row_norms(m: Matrix) -> np.ndarray:
    if m.has_dense:
        return np.linalg.norm(m.dense, axis=1)
    view = m.sparse_view
    return np.sqrt(np.asarray(view.multiply(view).sum(axis=1)).ravel())


def seginer_column_stat(m: Matrix) -> float:
    """Largest column Euclidean norm."""
    norms = _column_norms(m)
    return float(norms.max()) if norms.size else 0.0


def max_abs_entry(m: Matrix) -> float:
    values = m.dense if m.has_dense else m.sparse_view.data
    return float(np.max(np.abs(values))) if values.size else 0.0


def bvh_sigmas(b: Matrix) -> tuple[float, float, float]:
    """(largest row norm, largest column norm, largest absolute entry)."""
    rows, cols = _row_norms(b), _column_norms(b)
    return (
        float(rows.max()) if rows.size else 0.0,
        float(cols.max()) if cols.size else 0.0,
        max_abs_entry(b)
    )


def bvh_bound(b: Matrix, eps: float = 0.5) -> float:
    """(1 + eps)(sigma1 + sigma2 + 5 sigma* sqrt(log d) / sqrt(log(1 + eps))), d = min(rows, cols)."""
    if not eps > 0.0:
        raise ParameterError(f"eps must be positive, got {eps}")
    sigma1, sigma2, sigma_star = bvh_sigmas(b)
    log_d = np.log(max(min(b.shape), 1))
    return float((1.0 + eps) * (sigma1 + sigma2 + 5.0 * sigma_star * np.sqrt(log_d) / np.sqrt(np.log1p(eps))))


def norm_quantities(b: Matrix, eps: float = 0.5) -> NormQuantities:
    sigma1, sigma2, sigma_star = bvh_sigmas(b)
    return NormQuantities(
        seginer=seginer_column_stat(b),
        sigma1=sigma1,
        sigma2=sigma2,
        sigma_star=sigma_star,
        bvh_bound=bvh_bound(b, eps),
    )
