"""Window statistics and significance tests for run records."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from scipy import stats as _sp

from .errors import WindowOutOfRange

DEFAULT_WINDOW = (50, 150)


@dataclass(frozen=True)
class WindowStats:
    n: int
    mean_reliability: float
    sd_reliability: float
    mean_cost: float
    sd_cost: float
    mean_redundancy: float
    mean_pleiotropy: float
    mean_fitness: float


def window_records(records: Sequence, window: tuple[int, int]) -> list:
    """Records whose 1-based generation lies in the inclusive window."""
    start, end = window
    if start > end:
        raise WindowOutOfRange(f"window start {start} after end {end}")
    generations = [r.generation for r in records]
    if not generations or start < min(generations) or end > max(generations):
        span = f"{min(generations)}..{max(generations)}" if generations else "no records"
        raise WindowOutOfRange(f"window {window} outside recorded generations ({span})")
    return [r for r in records if start <= r.generation <= end]


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and sample (n-1) standard deviation; SD of one value is 0."""
    values = list(values)
    mean = statistics.fmean(values)
    sd = statistics.stdev(values, mean) if len(values) > 1 else 0.0
    return mean, sd


def summarize(records: Sequence, window: tuple[int, int] = DEFAULT_WINDOW) -> WindowStats:
    rows = window_records(records, window)
    rel_mean, rel_sd = mean_sd(r.best.reliability for r in rows)
    cost_mean, cost_sd = mean_sd(r.best.cost for r in rows)
    return WindowStats(
        n=len(rows),
        mean_reliability=rel_mean,
        sd_reliability=rel_sd,
        mean_cost=cost_mean,
        sd_cost=cost_sd,
        mean_redundancy=statistics.fmean(r.best.redundancy for r in rows),
        mean_pleiotropy=statistics.fmean(r.best.pleiotropy for r in rows),
        mean_fitness=statistics.fmean(r.best.fitness for r in rows),
    )


def t_critical(confidence: float, df: float, two_sided: bool = True) -> float:
    """Student-t quantile for the given confidence level."""
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    tail = (1.0 - confidence) / (2.0 if two_sided else 1.0)
    return float(_sp.t.ppf(1.0 - tail, df))


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    critical: float
    significant: bool


def welch_t_test(a: tuple[float, float, int], b: tuple[float, float, int],
                 confidence: float = 0.95) -> TTestResult:
    """Two-sided Welch t-test from (mean, sd, n) summaries.

    The statistic is (mean_a - mean_b) / sqrt(sd_a^2/n_a + sd_b^2/n_b) with
    Welch-Satterthwaite degrees of freedom. Two zero-variance samples give
    t = 0 (equal means, never significant) or an infinite t (different
    means, always significant).
    """
    (mean_a, sd_a, n_a), (mean_b, sd_b, n_b) = a, b
    if n_a < 2 or n_b < 2:
        raise ValueError("each sample needs n >= 2")
    if sd_a < 0 or sd_b < 0:
        raise ValueError("standard deviations must be nonnegative")
    va, vb = sd_a * sd_a / n_a, sd_b * sd_b / n_b
    se2 = va + vb
    diff = mean_a - mean_b
    if se2 == 0.0:
        df = float(n_a + n_b - 2)
        crit = t_critical(confidence, df)
        if diff == 0.0:
            return TTestResult(0.0, df, crit, False)
        return TTestResult(math.copysign(math.inf, diff), df, crit, True)
    t = diff / math.sqrt(se2)
    df = se2 * se2 / (va * va / (n_a - 1) + vb * vb / (n_b - 1))
    crit = t_critical(confidence, df)
    return TTestResult(t, df, crit, abs(t) > crit)


@dataclass(frozen=True)
class SlopeTest:
    slope: float
    stderr: float
    t: float
    df: int
    significantly_positive: bool


def slope_test(x: Sequence[float], y: Sequence[float], confidence: float = 0.95) -> SlopeTest:
    """Ordinary least-squares slope with a one-sided test for a positive trend."""
    fit = _sp.linregress(x, y)
    df = len(x) - 2
    t = fit.slope / fit.stderr if fit.stderr > 0 else (math.inf if fit.slope > 0 else 0.0)
    return SlopeTest(fit.slope, fit.stderr, t, df, t > t_critical(confidence, df, two_sided=False))
