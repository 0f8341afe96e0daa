# app/services/geometry.py

"""
geometry.py: Sphere Decomposition Toolkit

Unit vectors are split by how their mass sits across coordinates. This module
provides the non-increasing rearrangement of a vector, the compressible and
dominated-tail classifications built on it, the least common denominator (LCD)
search, the Levy concentration estimator and the calculators for the l_0 and
rho thresholds used to pick compressibility levels.

All functions are pure. UnitVector instances are immutable and cache their
rearrangement permutation.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from app.core.exceptions import (
    DataError,
    DomainError,
    ParameterError
)
from app.schemas.geometry import (
    LcdLowerBounds,
    LcdParams,
    LcdReport,
    ThresholdParams,
    VectorClass
)

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
# Slack that turns the strict LCD inequality into a stable floating comparison.
LCD_SLACK = 1e-12
# Upper bound on theta-by-coordinate products evaluated per grid chunk.
_CHUNK_ENTRIES = 1 << 20
MIN_LEVY_SAMPLES = 100


class UnitVector:
    """A unit vector with its magnitude ordering.

    ``perm[k]`` is the coordinate holding the (k+1)-th largest magnitude; ties keep
    coordinate order.
    """

    def __init__(self, coords, tolerance: float = UNIT_TOL) -> None:
        values = np.array(coords, dtype=np.float64).ravel()
        if values.size == 0:
            raise DataError("a unit vector needs at least one coordinate")
        if not np.all(np.isfinite(values)):
            raise DataError("vector contains non-finite coordinates")
        norm = float(np.linalg.norm(values))
        if abs(norm - 1.0) > tolerance:
            raise DataError(f"vector norm {norm!r} is not 1 within {tolerance}")
        values.setflags(write=False)
        perm = np.argsort(-np.abs(values), kind="stable")
        perm.setflags(write=False)
        self.coords = values
        self.perm = perm

    @classmethod
    def normalized(cls, values) -> "UnitVector":
        array = np.asarray(values, dtype=np.float64).ravel()
        norm = float(np.linalg.norm(array))
        if norm == 0.0 or not math.isfinite(norm):
            raise DataError("cannot normalise a zero or non-finite vector")
        return cls(array / norm, tolerance=1e-9)

    @property
    def n(self) -> int:
        return int(self.coords.size)

    @property
    def sup_norm(self) -> float:
        return float(abs(self.coords[self.perm[0]]))

    def __repr__(self) -> str:
        return f"UnitVector(n={self.n})"


def coerce_unit_vector(values, tolerance: float = 1e-6) -> UnitVector:
    """Accept a nearly unit vector, re-normalising it with a warning.

    Raises:
        DataError: If the norm is off by more than ``tolerance``.
    """
    array = np.asarray(values, dtype=np.float64).ravel()
    norm = float(np.linalg.norm(array))
    if abs(norm - 1.0) <= UNIT_TOL:
        return UnitVector(array)
    if abs(norm - 1.0) <= tolerance:
        logger.warning("Vector norm %r is off by %.3g, re-normalising", norm, abs(norm - 1.0))
        return UnitVector.normalized(array)
    raise DataError(f"vector norm {norm!r} differs from 1 by more than {tolerance}")


def _check_rank(x: UnitVector, m: int, name: str = "m") -> None:
    if not 1 <= m <= x.n:
        raise ParameterError(f"{name}={m} outside [1, {x.n}]")


def rearranged_segment(x: UnitVector, m: int, m_prime: int) -> np.ndarray:
    """x restricted to the coordinates of magnitude ranks m..m' (1-based), zero elsewhere.

    Raises:
        ParameterError: Unless 1 <= m <= m' <= n.
    """
    _check_rank(x, m)
    _check_rank(x, m_prime, "m'")
    if m > m_prime:
        raise ParameterError(f"empty rank range [{m}:{m_prime}]")
    out = np.zeros(x.n)
    support = x.perm[m - 1:m_prime]
    out[support] = x.coords[support]
    return out


def _tail(x: UnitVector, m: int) -> np.ndarray:
    return x.coords[x.perm[m:]]


def dist_to_sparse(x: UnitVector, m: int) -> float:
    """Euclidean distance from x to the m-sparse vectors, ||x_[m+1:n]||_2."""
    _check_rank(x, m)
    return float(np.linalg.norm(_tail(x, m)))


def is_compressible(x: UnitVector, m: int, delta: float) -> bool:
    return dist_to_sparse(x, m) <= delta


def is_dominated(x: UnitVector, m: int, alpha: float) -> bool:
    """Whether ||x_[m+1:n]||_2 <= alpha sqrt(m) ||x_[m+1:n]||_inf."""
    _check_rank(x, m)
    if not alpha > 0.0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    tail = _tail(x, m)
    if tail.size == 0 or not np.any(tail):
        return True
    return float(np.linalg.norm(tail)) <= alpha * math.sqrt(m) * float(np.max(np.abs(tail)))


def classify_vector(x: UnitVector, m: int, rho: float, alpha: float) -> VectorClass:
    """Place x in the sphere decomposition at level m."""
    distance = dist_to_sparse(x, m)
    tail = _tail(x, m)
    compressible = distance <= rho
    return VectorClass(
        m=m,
        compressible=compressible,
        incompressible=not compressible,
        dominated=is_dominated(x, m, alpha),
        dist_to_sparse=distance,
        tail_l2=distance,
        tail_sup=float(np.max(np.abs(tail))) if tail.size else 0.0,
    )


def resolve_lcd_params(params: LcdParams, n: int) -> tuple[float, float, float]:
    """(theta_max, grid_step, s) with s = sqrt(delta0 p).

    Raises:
        ParameterError: On p outside (0, 1], delta0 outside (0, 1), theta_max <= 0 or
            a grid step that is not positive or exceeds 1e-3 theta_max.
    """
    if not 0.0 < params.p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {params.p}")
    if not 0.0 < params.delta0 < 1.0:
        raise ParameterError(f"delta0 must lie in (0, 1), got {params.delta0}")
    s = math.sqrt(params.delta0 * params.p)
    theta_max = params.theta_max if params.theta_max is not None else 10.0 * math.sqrt(n) / s
    if not theta_max > 0.0:
        raise ParameterError(f"theta_max must be positive, got {theta_max}")
    grid_step = params.grid_step if params.grid_step is not None else min(1e-3 * theta_max, 1e-2)
    if not 0.0 < grid_step <= 1e-3 * theta_max * (1.0 + 1e-12):
        raise ParameterError(f"grid_step must lie in (0, 1e-3 theta_max], got {grid_step}")
    return theta_max, grid_step, s


def lattice_distance(thetas: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """dist(theta x, Z^n) for every theta."""
    scaled = np.multiply.outer(np.asarray(thetas, dtype=np.float64), coords)
    return np.linalg.norm(scaled - np.rint(scaled), axis=-1)


def lcd_threshold(thetas: np.ndarray, s: float) -> np.ndarray:
    """(1/s) sqrt(log_+(s theta))."""
    return np.sqrt(np.log(np.maximum(s * np.asarray(thetas, dtype=np.float64), 1.0))) / s


def lcd_condition(thetas: np.ndarray, coords: np.ndarray, s: float) -> np.ndarray:
    return lattice_distance(thetas, coords) + LCD_SLACK < lcd_threshold(thetas, s)


def lcd_lower_bounds(x: UnitVector, params: LcdParams) -> LcdLowerBounds:
    _, _, s = resolve_lcd_params(params, x.n)
    return LcdLowerBounds(universal=1.0 / s, sup_norm=1.0 / (2.0 * x.sup_norm))


def _bisect(lo: float, hi: float, coords: np.ndarray, s: float) -> float:
    """Shrink [lo, hi] around a crossing; lo fails the condition, hi satisfies it."""
    for _ in range(200):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if lcd_condition(np.array([mid]), coords, s)[0]:
            hi = mid
        else:
            lo = mid
    return hi


def lcd_report(x: UnitVector, params: LcdParams) -> LcdReport:
    """Grid-certified LCD with its analytic lower bounds.

    The grid starts at max((delta0 p)^(-1/2), 1/(2 ||x||_inf)); below that point the
    defining inequality cannot hold. The first satisfying grid point is refined by
    bisection against the preceding one. The returned value satisfies the
    inequality, so it bounds the true infimum from above; +inf means no grid point
    up to theta_max qualified.
    """
    theta_max, grid_step, s = resolve_lcd_params(params, x.n)
    bounds = LcdLowerBounds(universal=1.0 / s, sup_norm=1.0 / (2.0 * x.sup_norm))
    theta_lo = max(bounds.universal, bounds.sup_norm)

    def report(value: float, evaluated: int) -> LcdReport:
        return LcdReport(
            lcd=value,
            lower_bounds=bounds,
            theta_max=theta_max,
            grid_step=grid_step,
            grid_points=evaluated,
            params=params,
        )

    if theta_lo > theta_max:
        return report(math.inf, 0)

    count = int(math.floor((theta_max - theta_lo) / grid_step)) + 1
    chunk = max(1, _CHUNK_ENTRIES // x.n)
    for start in range(0, count, chunk):
        k = np.arange(start, min(count, start + chunk))
        satisfied = lcd_condition(theta_lo + k * grid_step, x.coords, s)
        if satisfied.any():
            first = start + int(np.argmax(satisfied))
            hi = theta_lo + first * grid_step
            if first == 0:
                return report(hi, 1)
            value = _bisect(theta_lo + (first - 1) * grid_step, hi, x.coords, s)
            return report(value, first + 1)
    logger.debug("No LCD below theta_max=%g for n=%d", theta_max, x.n)
    return report(math.inf, count)


def lcd(x: UnitVector, params: LcdParams) -> float:
    """The grid-certified LCD; +inf when the search cap is reached."""
    return lcd_report(x, params).lcd


def levy_concentration(samples, eps: float) -> float:
    """Sample-centred estimate of sup_u P(||Z - u|| <= eps).

    Each sample point is tried as a centre. Scalars use a sorted sweep, vectors a
    k-d tree.

    Raises:
        ParameterError: On an empty sample or eps <= 0.
    """
    data = np.asarray(samples, dtype=np.float64)
    if data.size == 0 or data.shape[0] == 0:
        raise ParameterError("levy_concentration needs at least one sample")
    if not eps > 0.0:
        raise ParameterError(f"eps must be positive, got {eps}")
    count = data.shape[0]
    if count < MIN_LEVY_SAMPLES:
        logger.warning("Levy concentration from only %d samples", count)

    if data.ndim == 1 or (data.ndim == 2 and data.shape[1] == 1):
        ordered = np.sort(data.ravel())
        inside = np.searchsorted(ordered, ordered + eps, side="right") - np.searchsorted(
            ordered, ordered - eps, side="left"
        )
        return float(inside.max()) / count
    tree = cKDTree(data.reshape(count, -1))
    inside = tree.query_ball_point(data.reshape(count, -1), r=eps, return_length=True)
    return float(np.max(inside)) / count


def moment_threshold_q(alpha: float) -> float:
    """q(alpha) = 2(2 - alpha)/(1 - alpha).

    Raises:
        DomainError: Unless 0 < alpha < 1.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return 2.0 * (2.0 - alpha) / (1.0 - alpha)


def threshold_params(
        K: float,
        R: float,
        p: float,
        n: int,
        c_tilde: float = 2.0,
        c_dom: float = 2.0,
        c_m: float = 0.5
) -> ThresholdParams:
    """l_0 = ceil(log(1/(8p)) / log sqrt(pn)) and rho = (c_tilde (K + R))^(-l_0 - 6).

    Also returns the dominated-tail parameter (c_dom (K + R))^-4 and the admissible
    compressibility levels ceil(1/p) <= M <= floor(c_m n). Natural logarithms.

    Raises:
        DomainError: If pn <= 1 or p is outside (0, 1/8).
        ParameterError: If K or R is below 1, or a constant is not positive.
    """
    if K < 1.0 or R < 1.0:
        raise ParameterError(f"K and R must be at least 1, got K={K}, R={R}")
    if min(c_tilde, c_dom, c_m) <= 0.0:
        raise ParameterError("c_tilde, c_dom and c_m must be positive")
    if not 0.0 < p < 0.125:
        raise DomainError(f"p must lie in (0, 1/8), got {p}")
    if p * n <= 1.0:
        raise DomainError(f"pn must exceed 1, got {p * n}")
    ratio = math.log(1.0 / (8.0 * p)) / math.log(math.sqrt(p * n))
    ell0 = max(1, math.ceil(ratio - 1e-12))
    return ThresholdParams(
        K=K,
        R=R,
        p=p,
        n=n,
        c_tilde=c_tilde,
        ell0=ell0,
        rho=(c_tilde * (K + R)) ** (-ell0 - 6),
        c_dom=c_dom,
        alpha_dom=(c_dom * (K + R)) ** -4,
        c_m=c_m,
        m_min=math.ceil(1.0 / p - 1e-12),
        m_max=math.floor(c_m * n),
    )


def spread_ratio(x: np.ndarray, i: int) -> Optional[float]:
    """||x_(i)||_inf / ||x_(i)||_2 where x_(i) zeroes coordinate i; None if x_(i) = 0."""
    reduced = np.array(x, dtype=np.float64)
    reduced[i] = 0.0
    norm = float(np.linalg.norm(reduced))
    if norm == 0.0:
        return None
    return float(np.max(np.abs(reduced))) / norm
