# app/utils/stats.py

"""
Summary statistics and confidence intervals for Monte-Carlo campaigns.

Probability estimates use the Wilson score interval; means use a Student-t
interval. Both take their critical values from scipy.stats.
"""

import math
from typing import (
    Optional,
    Sequence
)

import numpy as np
from scipy import stats

from app.core.exceptions import ParameterError
from app.schemas.experiment import SummaryStats

QUANTILE_LEVELS = (1, 5, 25, 75, 95, 99)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clipped to [0, 1]."""
    if trials <= 0:
        return 0.0, 1.0
    if not 0 <= successes <= trials:
        raise ParameterError(f"successes={successes} outside [0, {trials}]")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    denominator = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denominator
    half_width = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denominator
    return max(0.0, center - half_width), min(1.0, center + half_width)


def mean_confidence_interval(
        data: Sequence[float],
        confidence: float = 0.95
) -> Optional[tuple[float, float]]:
    """Student-t interval for the mean; None with fewer than two finite values."""
    values = np.asarray(data, dtype=np.float64)
    if values.size < 2 or not np.all(np.isfinite(values)):
        return None
    mean = float(np.mean(values))
    sem = float(np.std(values, ddof=1)) / math.sqrt(values.size)
    if sem == 0.0:
        return mean, mean
    half_width = float(stats.t.ppf(0.5 + confidence / 2.0, df=values.size - 1)) * sem
    return mean - half_width, mean + half_width


def summarize(
        values: Sequence[float],
        indicator: bool = False,
        failures: int = 0,
        attempted: Optional[int] = None,
        conditioned: Optional[tuple[int, int]] = None
) -> SummaryStats:
    """Aggregate the values of completed, conditioned trials.

    Args:
        values: Per-trial statistic values, in trial-index order.
        indicator: Values are 0/1 events; adds the frequency and its Wilson interval.
        failures: Trials that raised instead of producing a value.
        attempted: Trials started, defaults to len(values) + failures.
        conditioned: (passing, evaluated) counts of the conditioning event.
    """
    data = np.asarray(values, dtype=np.float64)
    summary = SummaryStats(
        count=int(data.size),
        failures=failures,
        attempted=attempted if attempted is not None else int(data.size) + failures,
    )
    if conditioned is not None:
        passing, evaluated = conditioned
        summary.conditioning_frequency = passing / evaluated if evaluated else None
        summary.conditioning_ci = wilson_interval(passing, evaluated) if evaluated else None
    if data.size == 0:
        return summary

    finite = bool(np.all(np.isfinite(data)))
    # inverted_cdf only ever returns sample values, so inf sentinels never meet arithmetic.
    method = "linear" if finite else "inverted_cdf"
    summary.median = float(np.quantile(data, 0.5, method=method))
    summary.quantiles = {
        str(level): float(np.quantile(data, level / 100.0, method=method)) for level in QUANTILE_LEVELS
    }
    if finite:
        summary.mean = float(np.mean(data))
        summary.std = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
        summary.mean_ci = mean_confidence_interval(data)
    elif not np.any(np.isnan(data)):
        summary.mean = math.inf if np.any(data == math.inf) and not np.any(data == -math.inf) else math.nan

    if indicator:
        hits = int(np.count_nonzero(data))
        summary.probability = hits / data.size
        summary.wilson_ci = wilson_interval(hits, int(data.size))
    return summary


def binomial_band(trials: int, p: float, level: float = 0.9999) -> tuple[int, int]:
    """Two-sided equal-tailed binomial quantile band."""
    tail = (1.0 - level) / 2.0
    return int(stats.binom.ppf(tail, trials, p)), int(stats.binom.isf(tail, trials, p))
