# app/services/montecarlo.py

"""
montecarlo.py: Reproducible Monte-Carlo Campaigns

This module turns the quantitative statements about sparse random matrices into
empirical checks with confidence intervals.

A campaign (ExperimentSpec) samples ``trials`` matrices per (n, p) point and
evaluates one statistic on each. Trials are the unit of parallel work: each one
reads only its own counter-based stream, so records are a pure function of
(spec, point, trial_index). Records are merged in (point, trial_index) order and
summaries are folded sequentially, which makes serial and threaded runs
bit-identical.

Main Components:
- run_experiment: the campaign runner.
- smin_tail_curve, fit_tail_band: the s_min small-ball curve and its fitted
  envelope C * eps + delta.
- zero_row_probability, norm_scaling_scan, condition_growth_scan: scaling-law
  campaigns.
- distance_lemma_check, distance_lemma_enumeration, singularity_enumeration:
  invertibility-via-distance checks and the exact 2 x 2 oracles.
- tensorization_check, row_small_ball_check, lcd_small_ball_check: checks of the
  small-ball ingredients.

Per-trial failures are logged, recorded on the TrialRecord and excluded from the
summary; they never abort a campaign.
"""

import itertools
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Callable,
    Optional,
    Sequence,
    TypeVar
)

import numpy as np
from scipy import (
    optimize,
    stats
)

from app.core.config import settings
from app.core.exceptions import (
    LabError,
    ParameterError
)
from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)
from app.schemas.experiment import (
    INDICATOR_STATISTICS,
    DistanceLemmaPoint,
    DistanceLemmaReport,
    ExperimentResult,
    ExperimentSpec,
    LcdSmallBallPoint,
    LcdSmallBallReport,
    PointSummary,
    RowSmallBallReport,
    ScanReport,
    TailCurve,
    TailCurvePoint,
    TensorizationPoint,
    TensorizationReport,
    TrialRecord,
    ZeroRowReport
)
from app.schemas.geometry import LcdParams
from app.services import (
    ensemble as ensemble_service,
    spectral
)
from app.services.geometry import (
    UnitVector,
    lcd,
    levy_concentration,
    moment_threshold_q,
    spread_ratio
)
from app.services.matrix import Matrix
from app.utils.prng import (
    CounterStream,
    Stream,
    trial_streams
)
from app.utils.stats import (
    summarize,
    wilson_interval
)

logger = logging.getLogger(__name__)

T = TypeVar("T")

_U64_MASK = (1 << 64) - 1
# Weyl increment separating the seeds of successive sweep points.
_POINT_STRIDE = 0x9E3779B97F4A7C15
# Statistics that only need products with the matrix.
_SPARSE_OK = frozenset({"s_max", "seginer", "max_entry", "zero_row"})
TRIAL_FAILURES = (LabError, MemoryError, np.linalg.LinAlgError, ArithmeticError)


def point_seed(master_seed: int, point: int) -> int:
    """Master seed of sweep point ``point``; point 0 keeps the campaign seed."""
    return (master_seed + point * _POINT_STRIDE) & _U64_MASK


def resolve_threads(threads: Optional[int] = None) -> int:
    threads = threads or settings.LAB_THREADS
    if threads < 0:
        raise ParameterError(f"threads must be non-negative, got {threads}")
    return threads or os.cpu_count() or 1


def parallel_map(function: Callable[..., T], tasks: Sequence[tuple], threads: int) -> list[T]:
    """Apply ``function`` to every task tuple; results come back in task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [function(*task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda task: function(*task), tasks))


def resolve_points(spec: ExperimentSpec) -> list[tuple[int, float]]:
    if spec.sweep:
        return [(int(n), float(p)) for n, p in spec.sweep]
    return [(spec.ensemble.n, spec.ensemble.p)]


def point_ensemble(base: EnsembleSpec, n: int, p: float) -> EnsembleSpec:
    """The ensemble at another (n, p); a constant shift is re-sized with n."""
    update: dict = {"n": n, "p": p}
    if base.shift is not None and len(base.shift) != n:
        if len(set(base.shift)) > 1:
            raise ParameterError("a non-constant shift cannot be swept over n")
        update["shift"] = [base.shift[0]] * n
    return base.model_copy(update=update)


def validate_experiment(spec: ExperimentSpec) -> None:
    """
    Raises:
        ParameterError: On trials < 1, an empty name, a bad seed, a non-positive K or
            an invalid ensemble at any sweep point.
    """
    if spec.trials < 1:
        raise ParameterError(f"trials must be at least 1, got {spec.trials}")
    if not spec.name:
        raise ParameterError("experiment name must not be empty")
    if not 0 <= spec.master_seed <= _U64_MASK:
        raise ParameterError(f"master_seed must be an unsigned 64-bit integer, got {spec.master_seed}")
    if spec.condition_K is not None and not spec.condition_K > 0.0:
        raise ParameterError(f"condition_K must be positive, got {spec.condition_K}")
    if spec.tol <= 0.0:
        raise ParameterError(f"tol must be positive, got {spec.tol}")
    for n, p in resolve_points(spec):
        ensemble_service.validate_spec(point_ensemble(spec.ensemble, n, p))
        if spec.statistic == "column_distance" and not 0 <= spec.column < n:
            raise ParameterError(f"column {spec.column} outside [0, {n})")


def _pattern_sets(spec: ExperimentSpec, n: int, p: float) -> tuple[list[int], list[int]]:
    J = spec.pattern_j if spec.pattern_j is not None else [0]
    if spec.pattern_j_prime is not None:
        return J, spec.pattern_j_prime
    width = int(math.floor(math.sqrt(p * n)))
    start = max(J) + 1 if J else 0
    return J, list(range(start, min(n, start + width)))


def _uses_exact_rank(ens: EnsembleSpec) -> bool:
    discrete = ens.adjacency_mode or ens.dist.is_discrete
    return discrete and ens.n <= settings.LAB_EXACT_RANK_LIMIT


def off_diagonal_norm(m: Matrix, tol: float = 1e-10) -> float:
    """||A - diag(A)||, the norm of the centred off-diagonal part."""
    if m.has_dense:
        return spectral.largest_singular_value(Matrix(dense=m.dense - np.diag(np.diag(m.dense))), tol)
    view = m.sparse_view.tolil()
    view.setdiag(0.0)
    return spectral.largest_singular_value(Matrix(csr=view.tocsr()), tol)


def evaluate_statistic(spec: ExperimentSpec, ens: EnsembleSpec, m: Matrix) -> float:
    statistic = spec.statistic
    if statistic == "s_min":
        return spectral.smallest_singular_estimate(m, spec.tol).value
    if statistic == "s_max":
        return spectral.largest_singular_value(m, spec.tol)
    if statistic == "cond":
        return spectral.condition_number(m, spec.tol)
    if statistic == "singular":
        if _uses_exact_rank(ens):
            return float(spectral.exact_rank(m) < min(m.rows, m.cols))
        return float(spectral.is_numerically_singular(m, spec.tol))
    if statistic == "zero_row":
        return float(ensemble_service.has_zero_row(m))
    if statistic == "max_entry":
        return spectral.max_abs_entry(m)
    if statistic == "seginer":
        return spectral.seginer_column_stat(m)
    if statistic == "column_distance":
        return spectral.column_span_distance(m, spec.column)
    J, J_prime = _pattern_sets(spec, ens.n, ens.p)
    return float(ensemble_service.pattern_count(m, J, J_prime, spec.threshold))


def run_trial(spec: ExperimentSpec, point: int, ens: EnsembleSpec, trial_index: int) -> TrialRecord:
    """Sample and evaluate one trial; failures are captured on the record."""
    started = time.perf_counter()
    record = dict(
        experiment=spec.name,
        point=point,
        n=ens.n,
        p=ens.p,
        trial_index=trial_index,
        statistic=spec.statistic,
    )
    try:
        seed = SeedSpec(master_seed=point_seed(spec.master_seed, point), trial_index=trial_index)
        m = ensemble_service.sample_auto(ens, seed, need_dense=spec.statistic not in _SPARSE_OK)
        conditioned = True
        if spec.condition_K is not None and math.isfinite(spec.condition_K):
            conditioned = off_diagonal_norm(m, spec.tol) <= spec.condition_K * math.sqrt(ens.n * ens.p)
        value = evaluate_statistic(spec, ens, m)
    except TRIAL_FAILURES as e:
        logger.warning("Trial %d of %s (n=%d, p=%g) failed: %s", trial_index, spec.name, ens.n, ens.p, e)
        return TrialRecord(**record, value=math.nan, conditioned=False, error=f"{type(e).__name__}: {e}")
    wall_ms = (time.perf_counter() - started) * 1e3 if spec.timings else 0.0
    return TrialRecord(**record, value=value, conditioned=conditioned, wall_ms=wall_ms)


def summarize_records(spec: ExperimentSpec, records: Sequence[TrialRecord], transform=None):
    completed = [r for r in records if r.error is None]
    kept = [r for r in completed if r.conditioned]
    values = [r.value for r in kept]
    if transform is not None:
        values = [transform(r, r.value) for r in kept]
    conditioned = (len(kept), len(completed)) if spec.condition_K is not None else None
    return summarize(
        values,
        indicator=spec.statistic in INDICATOR_STATISTICS,
        failures=len(records) - len(completed),
        attempted=len(records),
        conditioned=conditioned,
    )


def run_experiment(spec: ExperimentSpec, threads: Optional[int] = None) -> ExperimentResult:
    """Run a campaign.

    Args:
        spec: The campaign. With ``condition_K`` set, summaries aggregate only the
            trials with ||A - diag(A)|| <= K sqrt(np) and report that event's frequency.
        threads: Worker threads, overriding spec.threads; 0 or None means automatic.

    Returns:
        ExperimentResult: records in (point, trial_index) order and one summary per point.

    Raises:
        ParameterError: If the spec is invalid.
    """
    validate_experiment(spec)
    workers = resolve_threads(threads if threads is not None else spec.threads)
    points = resolve_points(spec)
    ensembles = [point_ensemble(spec.ensemble, n, p) for n, p in points]
    tasks = [
        (spec, point, ens, trial_index)
        for point, ens in enumerate(ensembles)
        for trial_index in range(spec.trials)
    ]
    logger.info(
        "Running %s: statistic=%s, %d point(s) x %d trial(s) on %d thread(s)",
        spec.name, spec.statistic, len(points), spec.trials, workers
    )
    records = parallel_map(run_trial, tasks, workers)

    summaries = []
    for point, (n, p) in enumerate(points):
        chunk = records[point * spec.trials:(point + 1) * spec.trials]
        summaries.append(PointSummary(n=n, p=p, summary=summarize_records(spec, chunk)))
    failures = sum(1 for r in records if r.error is not None)
    if failures:
        logger.warning("%s: %d of %d trial(s) failed", spec.name, failures, len(records))
    logger.info("Finished %s: %d record(s)", spec.name, len(records))
    return ExperimentResult(spec=spec, points=summaries, records=records)


def fit_tail_band(curve: Sequence[TailCurvePoint]) -> tuple[Optional[float], Optional[float]]:
    """Smallest envelope C * eps + delta lying above every finite, positive eps point.

    "Smallest" minimises the area under the envelope over the eps range, solved
    as a linear program with C >= 0 and 0 <= delta <= 1.
    """
    points = [(pt.eps, pt.probability) for pt in curve if math.isfinite(pt.eps) and pt.eps > 0.0]
    if not points:
        return None, None
    eps = np.array([e for e, _ in points])
    prob = np.array([q for _, q in points])
    lo, hi = float(eps.min()), float(eps.max())
    if hi > lo:
        objective = [(hi * hi - lo * lo) / 2.0, hi - lo]
    else:
        objective = [hi, 1.0]
    result = optimize.linprog(
        c=objective,
        A_ub=-np.column_stack([eps, np.ones_like(eps)]),
        b_ub=-prob,
        bounds=[(0.0, None), (0.0, 1.0)],
        method="highs",
    )
    if not result.success:
        logger.warning("Tail band fit failed: %s", result.message)
        return None, None
    return float(result.x[0]), float(result.x[1])


def smin_tail_curve(
        spec: ExperimentSpec,
        eps_grid: Sequence[float],
        result: Optional[ExperimentResult] = None,
        threads: Optional[int] = None
) -> TailCurve:
    """Empirical P(s_min <= eps sqrt(p/n)) with Wilson intervals, at the campaign's first point.

    Args:
        spec: Campaign; its statistic is replaced by s_min.
        eps_grid: Levels, sorted ascending on output; +inf gives probability 1.
        result: A finished s_min run of ``spec`` to reuse instead of sampling again.

    Raises:
        ParameterError: On an empty grid or a negative level.
    """
    if not eps_grid:
        raise ParameterError("eps_grid must not be empty")
    if any(e < 0.0 or math.isnan(e) for e in eps_grid):
        raise ParameterError("eps levels must be non-negative")
    if result is None or result.spec.statistic != "s_min":
        spec = spec.model_copy(update={"statistic": "s_min"})
        result = run_experiment(spec, threads)
    n, p = resolve_points(result.spec)[0]
    records = [r for r in result.records[:result.spec.trials] if r.error is None and r.conditioned]
    values = np.array([r.value for r in records])
    scale = math.sqrt(p / n)

    points = []
    for eps in sorted(eps_grid):
        hits = int(np.count_nonzero(values <= eps * scale)) if math.isfinite(eps) else values.size
        probability = hits / values.size if values.size else 0.0
        points.append(TailCurvePoint(eps=eps, probability=probability, ci=wilson_interval(hits, values.size)))
    fitted_C, fitted_delta = fit_tail_band(points)
    return TailCurve(
        n=n,
        p=p,
        trials=int(values.size),
        points=points,
        fitted_C=fitted_C,
        fitted_delta=fitted_delta,
    )


def zero_row_analytic(n: int, p: float) -> float:
    """1 - (1 - (1 - p)^n)^n."""
    return 1.0 - (1.0 - (1.0 - p) ** n) ** n


def zero_row_probability(
        n: int,
        p: float,
        trials: int,
        seed: int = 0,
        threads: Optional[int] = None
) -> ZeroRowReport:
    """Frequency of an all-zero row in the Bernoulli(p) mask, against the closed form."""
    spec = ExperimentSpec(
        name="zero-row",
        ensemble=EnsembleSpec(n=n, p=p, dist=EntryDistribution.constant(1.0)),
        trials=trials,
        master_seed=seed,
        statistic="zero_row",
    )
    return zero_row_report(run_experiment(spec, threads))


def zero_row_report(result: ExperimentResult) -> ZeroRowReport:
    """Compare a finished zero_row campaign at its first point with the closed form."""
    if result.spec.statistic != "zero_row":
        raise ParameterError(f"expected a zero_row campaign, got {result.spec.statistic}")
    n, p = resolve_points(result.spec)[0]
    summary = result.summary
    analytic = zero_row_analytic(n, p)
    ci = summary.wilson_ci or (0.0, 1.0)
    return ZeroRowReport(
        n=n,
        p=p,
        trials=summary.count,
        empirical=summary.probability or 0.0,
        analytic=analytic,
        ci=ci,
        consistent=ci[0] <= analytic <= ci[1],
    )


def normalized_norm(record: TrialRecord, value: float) -> float:
    """s_max / sqrt(np)."""
    return value / math.sqrt(record.n * record.p)


def normalized_condition(record: TrialRecord, value: float) -> float:
    """cond / n."""
    return value / record.n


def run_scan(
        statistic: str,
        dist: EntryDistribution,
        alpha: float,
        n_grid: Sequence[int],
        trials: int,
        master_seed: int,
        threads: Optional[int],
        transform: Callable[[TrialRecord, float], float],
        diagonal: str = "iid",
        shift_value: Optional[float] = None,
        name: Optional[str] = None
) -> tuple[ScanReport, ExperimentResult]:
    """Sweep p = n^-alpha over n_grid and summarise transform(record, value) per n.

    Returns:
        tuple: The ScanReport and the underlying campaign, whose records hold the raw values.
    """
    if not n_grid:
        raise ParameterError("n_grid must not be empty")
    if not 0.0 <= alpha < 1.0:
        raise ParameterError(f"alpha must lie in [0, 1), got {alpha}")
    grid = sorted(int(n) for n in n_grid)
    # alpha = 0 is the dense limit, where the fourth moment is the requirement.
    q = moment_threshold_q(alpha) if alpha > 0.0 else 4.0
    moment_ok = ensemble_service.moment_exponent_ok(dist, q)
    base = EnsembleSpec(
        n=grid[0],
        p=min(1.0, grid[0] ** -alpha),
        dist=dist,
        diagonal=diagonal,
        shift=[shift_value] * grid[0] if shift_value is not None else None,
    )
    spec = ExperimentSpec(
        name=name or f"{statistic}-scan",
        ensemble=base,
        trials=trials,
        master_seed=master_seed,
        statistic=statistic,
        sweep=[(n, min(1.0, n ** -alpha)) for n in grid],
    )
    result = run_experiment(spec, threads)
    points = []
    for point, (n, p) in enumerate(resolve_points(spec)):
        chunk = result.records[point * trials:(point + 1) * trials]
        points.append(PointSummary(n=n, p=p, summary=summarize_records(spec, chunk, transform)))
    medians = [pt.summary.median for pt in points if pt.summary.median is not None]
    finite = [m for m in medians if math.isfinite(m)]
    median_ratio = max(finite) / min(finite) if finite and min(finite) > 0.0 else math.inf
    growth_ratio = (
        medians[-1] / medians[0] if len(medians) == len(points) and medians and medians[0] > 0.0 else math.inf
    )
    report = ScanReport(
        statistic=statistic,
        dist=dist,
        alpha=alpha,
        q=q,
        moment_ok=moment_ok,
        points=points,
        median_ratio=median_ratio,
        growth_ratio=growth_ratio,
    )
    return report, result


def norm_scaling_scan(
        dist: EntryDistribution,
        alpha: float,
        n_grid: Sequence[int],
        trials: int,
        master_seed: int = 0,
        threads: Optional[int] = None
) -> ScanReport:
    """Per-n summaries of s_max / sqrt(np) with p = n^-alpha."""
    report, _ = run_scan(
        "s_max", dist, alpha, n_grid, trials, master_seed, threads,
        transform=normalized_norm,
    )
    return report


def condition_growth_scan(
        dist: EntryDistribution,
        alpha: float,
        n_grid: Sequence[int],
        trials: int,
        master_seed: int = 0,
        threads: Optional[int] = None,
        diagonal: str = "iid",
        shift_value: Optional[float] = None
) -> ScanReport:
    """Per-n summaries of cond / n with p = n^-alpha.

    A law without a finite q(alpha)-th moment is logged and flagged through
    ``moment_ok`` rather than rejected.
    """
    report, _ = run_scan(
        "cond", dist, alpha, n_grid, trials, master_seed, threads,
        transform=normalized_condition,
        diagonal=diagonal,
        shift_value=shift_value,
    )
    if not report.moment_ok:
        logger.warning("E|xi|^q is infinite for q=%g; condition scan runs outside its moment regime", report.q)
    return report


DEFAULT_EPS_GRID = (0.05, 0.1, 0.2, 0.4, 0.8)


def _distance_trial(ens: EnsembleSpec, master_seed: int, trial_index: int) -> Optional[tuple[float, np.ndarray]]:
    try:
        m = ensemble_service.sample_matrix(ens, SeedSpec(master_seed=master_seed, trial_index=trial_index))
        return spectral.smallest_singular_value(m), spectral.column_span_distances(m)
    except TRIAL_FAILURES as e:
        logger.warning("Distance-lemma trial %d failed: %s", trial_index, e)
        return None


def _check_lemma_args(n: int, rho: float, M: Optional[int]) -> int:
    if n < 2:
        raise ParameterError("the distance lemma needs n >= 2")
    if not rho > 0.0:
        raise ParameterError(f"rho must be positive, got {rho}")
    M = M if M is not None else max(1, n // 2)
    if not 1 <= M < n:
        raise ParameterError(f"M must satisfy 1 <= M < n, got M={M}, n={n}")
    return M


def distance_lemma_check(
        spec: EnsembleSpec,
        trials: int,
        master_seed: int = 0,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
        rho: float = 0.5,
        M: Optional[int] = None,
        threads: Optional[int] = None
) -> DistanceLemmaReport:
    """Invertibility via distance, checked empirically.

    Left side: P(s_min <= eps rho^2 sqrt(p/n)), which dominates the probability of
    the infimum over Incomp(M, rho). Right side: (1/M) sum_j P(dist_j <= rho sqrt(p) eps),
    estimated from all columns of all trials. The inequality "holds" at eps when the
    lower Wilson bound of the left side does not exceed the upper bound of the right.
    """
    ensemble_service.validate_spec(spec)
    if trials < 1:
        raise ParameterError(f"trials must be at least 1, got {trials}")
    if not spec.p > 0.0:
        raise ParameterError("the distance lemma needs p > 0")
    n, p = spec.n, spec.p
    M = _check_lemma_args(n, rho, M)

    tasks = [(spec, master_seed, t) for t in range(trials)]
    outcomes = [o for o in parallel_map(_distance_trial, tasks, resolve_threads(threads)) if o is not None]
    if not outcomes:
        raise ParameterError("every distance-lemma trial failed")
    s_min = np.array([o[0] for o in outcomes])
    distances = np.stack([o[1] for o in outcomes])
    completed = s_min.size

    points = []
    for eps in sorted(eps_grid):
        lhs_hits = int(np.count_nonzero(s_min <= eps * rho * rho * math.sqrt(p / n)))
        rhs_hits = int(np.count_nonzero(distances <= rho * math.sqrt(p) * eps))
        lhs_ci = wilson_interval(lhs_hits, completed)
        pooled_lo, pooled_hi = wilson_interval(rhs_hits, distances.size)
        scale = n / M
        rhs_ci = (pooled_lo * scale, pooled_hi * scale)
        points.append(DistanceLemmaPoint(
            eps=eps,
            lhs=lhs_hits / completed,
            lhs_ci=lhs_ci,
            rhs=rhs_hits / distances.size * scale,
            rhs_ci=rhs_ci,
            holds=lhs_ci[0] <= rhs_ci[1],
        ))
    return DistanceLemmaReport(
        n=n,
        p=p,
        trials=completed,
        rho=rho,
        M=M,
        lhs_estimator="P(s_min <= eps rho^2 sqrt(p/n))",
        points=points,
    )


def _two_by_two(mu: float):
    """Every 2 x 2 0/1 matrix with its probability under i.i.d. Bernoulli(mu) entries."""
    for bits in itertools.product((0.0, 1.0), repeat=4):
        ones = int(sum(bits))
        yield np.array(bits).reshape(2, 2), mu ** ones * (1.0 - mu) ** (4 - ones)


def singularity_enumeration(mu: float = 0.5) -> float:
    """Exact P(det = 0) for a 2 x 2 matrix of i.i.d. Bernoulli(mu) entries."""
    if not 0.0 < mu < 1.0:
        raise ParameterError(f"mu must lie in (0, 1), got {mu}")
    return sum(prob for a, prob in _two_by_two(mu) if a[0, 0] * a[1, 1] == a[0, 1] * a[1, 0])


def incompressible_infimum(a: np.ndarray, rho: float) -> float:
    """min ||Ax|| over unit x in R^2 with min(|x_1|, |x_2|) >= rho; +inf if that set is empty.

    The minimum of a quadratic form on an arc sits at an eigenvector of A^T A inside
    the arc or at an endpoint.
    """
    if rho > math.sqrt(0.5):
        return math.inf
    candidates = [np.array([sx * rho, sy * math.sqrt(1.0 - rho * rho)]) for sx in (1, -1) for sy in (1, -1)]
    candidates += [c[::-1] for c in candidates]
    _, vectors = np.linalg.eigh(a.T @ a)
    candidates += [v for v in vectors.T if min(abs(v[0]), abs(v[1])) >= rho]
    return min(float(np.linalg.norm(a @ x)) for x in candidates)


def distance_lemma_enumeration(
        mu: float = 0.5,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
        rho: float = 0.5,
        p: Optional[float] = None
) -> DistanceLemmaReport:
    """Both sides of the distance lemma at n = 2, M = 1, by enumerating all 16 matrices.

    ``p`` is the sparsity in the scalings, defaulting to ``mu`` (the matrix is then the
    Bernoulli mask of the constant-one ensemble).
    """
    if not 0.0 < mu < 1.0:
        raise ParameterError(f"mu must lie in (0, 1), got {mu}")
    p = mu if p is None else p
    M = _check_lemma_args(2, rho, 1)
    cases = []
    for a, prob in _two_by_two(mu):
        m = Matrix(dense=a)
        distances = [spectral.column_span_distance(m, j) for j in range(2)]
        cases.append((prob, incompressible_infimum(a, rho), distances))

    points = []
    for eps in sorted(eps_grid):
        lhs = sum(prob for prob, infimum, _ in cases if infimum <= eps * rho * rho * math.sqrt(p / 2.0))
        rhs = sum(
            prob * sum(1 for d in distances if d <= rho * math.sqrt(p) * eps)
            for prob, _, distances in cases
        ) / M
        points.append(DistanceLemmaPoint(
            eps=eps, lhs=lhs, lhs_ci=(lhs, lhs), rhs=rhs, rhs_ci=(rhs, rhs), holds=lhs <= rhs + 1e-15
        ))
    return DistanceLemmaReport(
        n=2,
        p=p,
        trials=len(cases),
        rho=rho,
        M=M,
        lhs_estimator="exact infimum over Incomp(1, rho) by enumeration",
        points=points,
        exact=True,
    )


def tensorization_check(
        q: float = 0.2,
        n_grid: Sequence[int] = (100, 1000),
        c: float = 0.1,
        trials: int = 10000,
        master_seed: int = 0
) -> TensorizationReport:
    """P(sum V_j <= c q n / log(1/q)) for V_j = 2 Bernoulli(q), empirical and exact."""
    if not 0.0 < q < 0.5:
        raise ParameterError(f"q must lie in (0, 1/2), got {q}")
    if trials < 1 or not n_grid:
        raise ParameterError("need at least one trial and one n")
    points = []
    for point, n in enumerate(sorted(int(n) for n in n_grid)):
        threshold = c * q * n / math.log(1.0 / q)
        seed = point_seed(master_seed, point)
        hits = 0
        for trial_index in range(trials):
            uniforms = CounterStream(seed, trial_index, Stream.VALUE).uniforms(0, n)
            hits += 2.0 * np.count_nonzero(uniforms < q) <= threshold
        exact = float(stats.binom.cdf(math.floor(threshold / 2.0), n, q))
        points.append(TensorizationPoint(
            n=n,
            threshold=threshold,
            empirical=hits / trials,
            exact=exact,
            ci=wilson_interval(int(hits), trials),
        ))
    decays = all(
        later.exact < earlier.exact and later.empirical <= earlier.empirical
        for earlier, later in zip(points, points[1:])
    )
    return TensorizationReport(q=q, c=c, trials=trials, points=points, decays=decays)


def sample_row_sums(
        dist: EntryDistribution,
        p: float,
        x: np.ndarray,
        trials: int,
        master_seed: int = 0,
        exclude: Optional[int] = None
) -> np.ndarray:
    """``trials`` draws of sum_j delta_j xi_j x_j, skipping coordinate ``exclude``."""
    ensemble_service.validate_distribution(dist)
    x = np.asarray(x, dtype=np.float64).ravel()
    n = x.size
    mask_stream, value_stream = trial_streams(master_seed, 0)
    values = ensemble_service.transform_uniforms(dist, value_stream.uniforms(0, trials * n)).reshape(trials, n)
    mask = mask_stream.uniforms(0, trials * n).reshape(trials, n) < p
    weights = x.copy()
    if exclude is not None:
        weights[exclude] = 0.0
    return (np.where(mask, values, 0.0) @ weights).ravel()


def row_small_ball_check(
        dist: EntryDistribution,
        p: float,
        x,
        i: int = 0,
        trials: int = 10000,
        master_seed: int = 0
) -> RowSmallBallReport:
    """Levy concentration of one row product (A x)_i at radius sqrt(p) ||x_(i)||_2 / 4.

    Reports the spread ratio ||x_(i)||_inf / ||x_(i)||_2 and the constant
    c = (1 - L)(ratio^2 + p) / p that the measured concentration L implies.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if not 0 <= i < x.size:
        raise ParameterError(f"row {i} outside [0, {x.size})")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    ratio = spread_ratio(x, i)
    if ratio is None:
        raise ParameterError("x vanishes outside coordinate i")
    reduced_norm = float(np.linalg.norm(np.delete(x, i)))
    radius = 0.25 * math.sqrt(p) * reduced_norm
    concentration = levy_concentration(sample_row_sums(dist, p, x, trials, master_seed, exclude=i), radius)
    return RowSmallBallReport(
        p=p,
        row=i,
        trials=trials,
        radius=radius,
        concentration=concentration,
        spread_ratio=ratio,
        implied_constant=(1.0 - concentration) * (ratio * ratio + p) / p,
    )


def lcd_small_ball_check(
        v: UnitVector,
        params: LcdParams,
        dist: EntryDistribution,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
        trials: int = 10000,
        master_seed: int = 0
) -> LcdSmallBallReport:
    """Levy concentration of sum_j delta_j xi_j v_j at sqrt(p) eps against eps + 1/(sqrt(p) D(v))."""
    if not eps_grid:
        raise ParameterError("eps_grid must not be empty")
    p = params.p
    value = lcd(v, params)
    sums = sample_row_sums(dist, p, v.coords, trials, master_seed)
    points = []
    for eps in sorted(eps_grid):
        concentration = levy_concentration(sums, math.sqrt(p) * eps)
        shape = eps + (0.0 if math.isinf(value) else 1.0 / (math.sqrt(p) * value))
        points.append(LcdSmallBallPoint(
            eps=eps,
            concentration=concentration,
            bound_shape=shape,
            ratio=concentration / shape if shape > 0.0 else math.inf,
        ))
    return LcdSmallBallReport(
        p=p,
        lcd=value,
        trials=trials,
        points=points,
        fitted_constant=max(pt.ratio for pt in points),
    )
