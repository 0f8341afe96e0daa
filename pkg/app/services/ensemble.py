# app/services/ensemble.py

"""
ensemble.py: Sparse Random Matrix Sampling

This module samples every matrix law the laboratory works with and hosts the
structural transforms and combinatorial diagnostics defined on them.

An entry of the sparse ensemble is a_ij = delta_ij * xi_ij, where delta_ij is a
Bernoulli(p) mask and xi_ij follows an EntryDistribution. Both factors are
inverse-CDF transforms of one uniform each, taken from the mask and value
streams of app.utils.prng at the entry's row-major linear index. Entry (i, j)
therefore depends only on (master_seed, trial_index, i * n + j): dense sampling,
row-block sampling and parallel trials all produce bit-identical values.

Main Components:
- sample_matrix / sample_matrix_sparse / sample_directed_er: the generators.
- fold_matrix, pattern_count, zero_row_count: transforms and diagnostics.
- abs_moment, tail_probability, psi2_norm, moment_growth_beta: closed-form facts
  about the entry laws, used as oracles by the Monte-Carlo checks.
"""

import logging
import math
from typing import (
    Iterable,
    Optional,
    Sequence
)

import numpy as np
from scipy import (
    sparse,
    special
)

from app.core.config import settings
from app.core.exceptions import (
    DomainError,
    ParameterError,
    ShapeError
)
from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)
from app.services.matrix import Matrix
from app.utils.prng import (
    CounterStream,
    Stream,
    trial_streams
)

logger = logging.getLogger(__name__)


def pareto_scale(rho: float) -> float:
    """t0 of the symmetric Pareto law with unit variance."""
    return math.sqrt((rho - 2.0) / rho)


def validate_distribution(dist: EntryDistribution) -> None:
    """
    Raises:
        ParameterError: If the parameter that belongs to ``dist.kind`` is missing or
            outside its range.
    """
    if dist.kind == "pareto":
        if dist.rho is None or not dist.rho > 2.0:
            raise ParameterError(f"pareto tail exponent rho must exceed 2, got {dist.rho}")
    elif dist.kind == "bernoulli":
        if dist.mu is None or not 0.0 < dist.mu < 1.0:
            raise ParameterError(f"bernoulli mean mu must lie in (0, 1), got {dist.mu}")
    elif dist.kind == "constant":
        if dist.value is None or not math.isfinite(dist.value):
            raise ParameterError(f"constant value must be finite, got {dist.value}")


def validate_spec(spec: EnsembleSpec) -> None:
    """
    Raises:
        ParameterError: On n < 1, p outside [0, 1], a bad entry law or a shift of the
            wrong length.
    """
    if spec.n < 1:
        raise ParameterError(f"n must be at least 1, got {spec.n}")
    # p = 0 is accepted: it is the empty mask.
    if not 0.0 <= spec.p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {spec.p}")
    if spec.adjacency_mode and spec.diagonal != "zero":
        raise ParameterError("adjacency_mode requires diagonal = 'zero'")
    validate_distribution(spec.dist)
    if spec.shift is not None:
        if len(spec.shift) != spec.n:
            raise ParameterError(f"shift has {len(spec.shift)} entries, expected {spec.n}")
        if not all(math.isfinite(v) for v in spec.shift):
            raise ParameterError("shift entries must be finite")


def transform_uniforms(dist: EntryDistribution, u: np.ndarray) -> np.ndarray:
    """Map uniforms on (0, 1) to draws of ``dist`` by inverse CDF."""
    if dist.kind == "rademacher":
        return np.where(u < 0.5, -1.0, 1.0)
    if dist.kind == "gaussian":
        return special.ndtri(u)
    if dist.kind == "pareto":
        # The lower half of (0, 1) gives the negative branch, the upper half the positive one.
        negative = u < 0.5
        w = np.where(negative, 1.0 - 2.0 * u, 2.0 - 2.0 * u)
        magnitude = pareto_scale(dist.rho) * w ** (-1.0 / dist.rho)
        return np.where(negative, -magnitude, magnitude)
    if dist.kind == "bernoulli":
        return (u < dist.mu).astype(np.float64)
    return np.full(u.shape, float(dist.value))


def _effective(spec: EnsembleSpec) -> tuple[EntryDistribution, bool]:
    """Entry law and whether the mask applies."""
    if spec.adjacency_mode:
        return EntryDistribution.bernoulli(spec.p), False
    return spec.dist, spec.p < 1.0


def _sample_rows(
        spec: EnsembleSpec,
        mask_stream: CounterStream,
        value_stream: CounterStream,
        row_start: int,
        row_stop: int
) -> np.ndarray:
    n = spec.n
    dist, masked = _effective(spec)
    start, count = row_start * n, (row_stop - row_start) * n

    if dist.kind == "constant":
        block = np.full(count, float(dist.value))
    else:
        block = transform_uniforms(dist, value_stream.uniforms(start, count))
    if masked:
        block = np.where(mask_stream.uniforms(start, count) < spec.p, block, 0.0)
    block = block.reshape(row_stop - row_start, n)

    rows = np.arange(row_start, row_stop)
    if spec.diagonal == "zero":
        block[rows - row_start, rows] = 0.0
    if spec.shift is not None:
        block[rows - row_start, rows] += np.asarray(spec.shift, dtype=np.float64)[row_start:row_stop]
    # Drop negative zeros so files and hashes do not depend on the sign bit.
    block[block == 0.0] = 0.0
    return block


def sample_matrix(spec: EnsembleSpec, seed: SeedSpec) -> Matrix:
    """Sample A = (delta_ij xi_ij) + D_n with dense storage.

    Args:
        spec: The ensemble. ``p = 0`` yields the zero matrix plus the shift.
        seed: Master seed and trial index.

    Returns:
        Matrix: n x n matrix, bit-identical for identical (spec, seed).

    Raises:
        ParameterError: If the spec is invalid (p outside [0, 1], rho <= 2, ...).
    """
    validate_spec(spec)
    mask_stream, value_stream = trial_streams(seed.master_seed, seed.trial_index)
    return Matrix(dense=_sample_rows(spec, mask_stream, value_stream, 0, spec.n))


def sample_matrix_sparse(
        spec: EnsembleSpec,
        seed: SeedSpec,
        block_rows: Optional[int] = None
) -> Matrix:
    """Sample the same matrix as sample_matrix, straight into CSR storage.

    Rows are generated in blocks so peak memory stays at one dense block plus the
    sparse result. Used for large n when only norm-type statistics are needed.
    """
    validate_spec(spec)
    n = spec.n
    if block_rows is None:
        block_rows = max(1, (1 << 22) // n)
    mask_stream, value_stream = trial_streams(seed.master_seed, seed.trial_index)
    blocks = []
    for row_start in range(0, n, block_rows):
        row_stop = min(n, row_start + block_rows)
        blocks.append(sparse.csr_matrix(_sample_rows(spec, mask_stream, value_stream, row_start, row_stop)))
    logger.debug("sampled %dx%d matrix in %d row blocks", n, n, len(blocks))
    return Matrix(csr=sparse.vstack(blocks, format="csr"))


def sample_auto(spec: EnsembleSpec, seed: SeedSpec, need_dense: bool) -> Matrix:
    """Dense sampling unless the matrix is large and the caller only needs products."""
    if need_dense or spec.n <= settings.LAB_DENSE_LIMIT:
        return sample_matrix(spec, seed)
    return sample_matrix_sparse(spec, seed)


def sample_directed_er(n: int, p: float, seed: SeedSpec) -> Matrix:
    """Adjacency matrix of a directed Erdos-Renyi graph without self-loops.

    Raises:
        ParameterError: If p is not in the open interval (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise ParameterError(f"edge probability must lie in (0, 1), got {p}")
    spec = EnsembleSpec(n=n, p=p, diagonal="zero", adjacency_mode=True)
    return sample_matrix(spec, seed)


def sample_entries(dist: EntryDistribution, size: int, seed: SeedSpec) -> np.ndarray:
    """i.i.d. draws of ``dist`` from the value stream of ``seed``."""
    validate_distribution(dist)
    if size < 0:
        raise ParameterError(f"size must be non-negative, got {size}")
    value_stream = CounterStream(seed.master_seed, seed.trial_index, Stream.VALUE)
    return transform_uniforms(dist, value_stream.uniforms(0, size))


def omega_shift(n: int, p: float, omega: float) -> list[float]:
    """The real shift D_n = omega * sqrt(np) * I_n."""
    if n < 1 or not 0.0 < p <= 1.0:
        raise ParameterError(f"need n >= 1 and p in (0, 1], got n={n}, p={p}")
    return [omega * math.sqrt(n * p)] * n


def fold_matrix(m: Matrix) -> Matrix:
    """Row i of the result is row i minus row i + floor(n/2); an odd last row is dropped.

    Raises:
        ShapeError: If m has fewer than two rows.
    """
    if m.rows < 2:
        raise ShapeError(f"folding needs at least 2 rows, got {m.rows}")
    half = m.rows // 2
    if m.has_dense:
        return Matrix(dense=m.dense[:half] - m.dense[half:2 * half])
    view = m.sparse_view
    return Matrix(csr=(view[:half] - view[half:2 * half]).tocsr())


def _check_columns(indices: Iterable[int], cols: int, name: str) -> list[int]:
    out = [int(j) for j in indices]
    if len(set(out)) != len(out):
        raise ParameterError(f"{name} contains repeated columns")
    for j in out:
        if not 0 <= j < cols:
            raise ParameterError(f"{name} column {j} outside [0, {cols})")
    return out


def pattern_count(
        m: Matrix,
        J: Sequence[int],
        J_prime: Sequence[int],
        threshold: float = 1.0
) -> int:
    """Count rows with exactly one entry on J, that entry at least ``threshold``
    in magnitude, and no entry on J'.

    Raises:
        ParameterError: If J and J' overlap or reference missing columns.
    """
    J = _check_columns(J, m.cols, "J")
    J_prime = _check_columns(J_prime, m.cols, "J'")
    if set(J) & set(J_prime):
        raise ParameterError("J and J' must be disjoint")
    if not J:
        return 0
    if m.has_dense:
        on_j, on_jp = m.dense[:, J], m.dense[:, J_prime]
    else:
        on_j, on_jp = m.sparse_view[:, J].toarray(), m.sparse_view[:, J_prime].toarray()

    nonzero = on_j != 0.0
    large = nonzero & (np.abs(on_j) >= threshold)
    qualifies = (nonzero.sum(axis=1) == 1) & (large.sum(axis=1) == 1)
    if J_prime:
        qualifies &= ~np.any(on_jp != 0.0, axis=1)
    return int(np.count_nonzero(qualifies))


def pattern_row_probability(
        dist: EntryDistribution,
        p: float,
        j_size: int,
        j_prime_size: int,
        threshold: float = 1.0
) -> float:
    """Exact probability that a row qualifies in pattern_count.

    Assumes the row's diagonal lies outside J and J', threshold > 0.
    """
    if not j_size:
        return 0.0
    zero = (1.0 - p) + p * zero_probability(dist)
    return j_size * p * tail_probability(dist, threshold) * zero ** (j_size - 1 + j_prime_size)


def zero_probability(dist: EntryDistribution) -> float:
    """P(xi = 0)."""
    if dist.kind == "bernoulli":
        return 1.0 - dist.mu
    if dist.kind == "constant":
        return 1.0 if dist.value == 0.0 else 0.0
    return 0.0


def zero_row_count(m: Matrix) -> int:
    view = m.sparse_view
    return int(np.count_nonzero(np.diff(view.indptr) == 0))


def has_zero_row(m: Matrix) -> bool:
    return zero_row_count(m) > 0


def _log_abs_moment(dist: EntryDistribution, h: float) -> float:
    if dist.kind == "rademacher":
        return 0.0
    if dist.kind == "gaussian":
        return 0.5 * h * math.log(2.0) + special.gammaln(0.5 * (h + 1.0)) - 0.5 * math.log(math.pi)
    if dist.kind == "pareto":
        if h >= dist.rho:
            return math.inf
        return math.log(dist.rho / (dist.rho - h)) + h * math.log(pareto_scale(dist.rho))
    if dist.kind == "bernoulli":
        return math.log(dist.mu)
    if dist.value == 0.0:
        return -math.inf
    return h * math.log(abs(dist.value))


def abs_moment(dist: EntryDistribution, h: float) -> float:
    """E|xi|^h in closed form; +inf for a Pareto law when h >= rho.

    Raises:
        DomainError: If h <= 0.
    """
    validate_distribution(dist)
    if not h > 0.0:
        raise DomainError(f"moment order must be positive, got {h}")
    log_moment = _log_abs_moment(dist, h)
    return math.inf if log_moment == math.inf else math.exp(log_moment)


def tail_probability(dist: EntryDistribution, t: float) -> float:
    """P(|xi| >= t)."""
    validate_distribution(dist)
    if t <= 0.0:
        return 1.0
    if dist.kind == "rademacher":
        return 1.0 if t <= 1.0 else 0.0
    if dist.kind == "gaussian":
        return float(2.0 * special.ndtr(-t))
    if dist.kind == "pareto":
        t0 = pareto_scale(dist.rho)
        return 1.0 if t <= t0 else (t / t0) ** (-dist.rho)
    if dist.kind == "bernoulli":
        return dist.mu if t <= 1.0 else 0.0
    return 1.0 if abs(dist.value) >= t else 0.0


def psi2_norm(dist: EntryDistribution, k_max: int = 64) -> float:
    """sup_k k^(-1/2) (E|xi|^k)^(1/k) over k = 1..k_max."""
    validate_distribution(dist)
    if k_max < 1:
        raise ParameterError(f"k_max must be at least 1, got {k_max}")
    best = 0.0
    for k in range(1, k_max + 1):
        log_moment = _log_abs_moment(dist, k)
        if log_moment == math.inf:
            return math.inf
        if log_moment == -math.inf:
            continue
        best = max(best, math.exp(log_moment / k) / math.sqrt(k))
    return best


def moment_growth_beta(dist: EntryDistribution, h_grid: Optional[Sequence[float]] = None) -> float:
    """Smallest beta with ||xi||_h <= ||xi||_1 * h^beta on the grid.

    beta = 1/2 is the sub-Gaussian class, beta = 1 the sub-exponential one. Returns
    +inf when some moment on the grid is infinite.
    """
    validate_distribution(dist)
    h_grid = list(h_grid) if h_grid is not None else list(range(2, 33))
    if any(h <= 1.0 for h in h_grid):
        raise DomainError("moment_growth_beta needs moment orders above 1")
    log_c = _log_abs_moment(dist, 1.0)
    if log_c == -math.inf:
        return 0.0
    beta = 0.0
    for h in h_grid:
        log_moment = _log_abs_moment(dist, h)
        if log_moment == math.inf:
            return math.inf
        beta = max(beta, (log_moment / h - log_c) / math.log(h))
    return beta


def moment_exponent_ok(dist: EntryDistribution, q: float) -> bool:
    """Whether E|xi|^q is finite."""
    return math.isfinite(abs_moment(dist, q))
