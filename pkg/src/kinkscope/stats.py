"""Statistical tests confronting Monte Carlo summaries with closed forms.

Chi-square goodness of fit with classical small-expectation pooling, the
one-sample Kolmogorov-Smirnov distance against an arbitrary CDF, and
normal-approximation confidence intervals for histogram means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import gammaincc, ndtri

# Classical minimum expected count per chi-square bin before pooling.
POOLING_MIN_EXPECTED = 5.0

# Floor protecting the chi-square division when a zero-probability bin
# cannot be pooled away (fewer than three bins).
_EXPECTED_FLOOR = 1e-300


@dataclass(frozen=True)
class GofReport:
    """Outcome of one statistical test at significance level ``alpha``."""

    test: str
    statistic: float
    dof: int
    threshold: float
    passed: bool
    alpha: float

    def __post_init__(self):
        if self.passed != (self.statistic <= self.threshold):
            raise ValueError("passed must equal statistic <= threshold")

    @classmethod
    def evaluate(
        cls, test: str, statistic: float, dof: int, threshold: float, alpha: float
    ) -> "GofReport":
        return cls(
            test=test,
            statistic=float(statistic),
            dof=int(dof),
            threshold=float(threshold),
            passed=bool(statistic <= threshold),
            alpha=float(alpha),
        )

    def to_json_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "dof": self.dof,
            "threshold": self.threshold,
            "pass": self.passed,
            "alpha": self.alpha,
        }


def chi_square_statistic(observed, expected_probs, trials: int):
    """Pearson chi-square statistic with nearest-neighbor pooling.

    Bins whose expected count falls below ``POOLING_MIN_EXPECTED`` are merged
    into their adjacent neighbor with the smaller expectation (from the tails
    inward, smallest first) until every bin qualifies or only two bins
    remain.  Returns ``(statistic, dof)`` with ``dof = bins_after_pooling - 1``.
    """
    obs = np.asarray(observed, dtype=np.int64)
    probs = np.asarray(expected_probs, dtype=np.float64)
    if obs.ndim != 1 or obs.shape != probs.shape:
        raise ValueError("observed and expected_probs must be equal-length 1-D")
    if obs.shape[0] < 2:
        raise ValueError("need at least 2 bins")
    if int(obs.sum()) != int(trials):
        raise ValueError("observed counts must sum to trials")
    if abs(float(probs.sum()) - 1.0) > 1e-9:
        raise ValueError("expected probabilities must sum to 1")

    bins = [[float(o), float(p) * trials] for o, p in zip(obs, probs)]
    while len(bins) > 2:
        expectations = [e for _, e in bins]
        i = int(np.argmin(expectations))
        if expectations[i] >= POOLING_MIN_EXPECTED:
            break
        if i == 0:
            j = 1
        elif i == len(bins) - 1:
            j = i - 1
        else:
            j = i - 1 if bins[i - 1][1] <= bins[i + 1][1] else i + 1
        bins[j][0] += bins[i][0]
        bins[j][1] += bins[i][1]
        del bins[i]

    statistic = sum(
        (o - e) ** 2 / max(e, _EXPECTED_FLOOR) for o, e in bins
    )
    return float(statistic), len(bins) - 1


def chi_square_critical(dof: int, alpha: float) -> float:
    """Upper-``alpha`` chi-square quantile via bisection on ``Q(dof/2, x/2)``."""
    if dof < 1:
        raise ValueError("dof must be a positive integer")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    half = 0.5 * dof
    lo, hi = 0.0, float(max(dof, 1))
    while gammaincc(half, 0.5 * hi) > alpha:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("failed to bracket the chi-square quantile")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if gammaincc(half, 0.5 * mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_statistic(samples, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov distance against a CDF callable.

    ``D = max_i max(i/n - F(x_i), F(x_i) - (i-1)/n)`` on the sorted sample.
    The callable should accept numpy arrays; scalars-only callables work too.
    """
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    if xs.size == 0:
        raise ValueError("samples must be nonempty")
    if not np.all(np.isfinite(xs)):
        raise ValueError("samples must be finite")
    try:
        cdf_values = np.asarray(cdf(xs), dtype=np.float64)
        if cdf_values.shape != xs.shape:
            raise ValueError
    except (TypeError, ValueError):
        cdf_values = np.asarray([cdf(x) for x in xs], dtype=np.float64)
    n = xs.size
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max((upper - cdf_values).max(), (cdf_values - lower).max()))


def kolmogorov_critical(n: int, alpha: float) -> float:
    """Asymptotic KS rejection threshold ``sqrt(-ln(alpha/2)/2) / sqrt(n)``."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n)


class MeanCI(NamedTuple):
    mean: float
    halfwidth: float
    degenerate: bool


def mean_ci(count_histogram, trials: int, confidence: float) -> MeanCI:
    """Normal-approximation confidence interval for the histogram mean.

    ``mean +/- z * sqrt(sample_variance / trials)``.  A zero sample variance
    cannot support the normal approximation, so it is flagged as degenerate
    (the halfwidth collapses to 0).
    """
    hist = np.asarray(count_histogram, dtype=np.int64)
    if trials < 2:
        raise ValueError("trials must be at least 2")
    if int(hist.sum()) != int(trials):
        raise ValueError("histogram must sum to trials")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    values = np.arange(hist.shape[0], dtype=np.float64)
    mean = float(values @ hist) / trials
    sum_sq = float((values * values) @ hist)
    variance = max(sum_sq - trials * mean * mean, 0.0) / (trials - 1)
    z = float(ndtri(0.5 + 0.5 * confidence))
    return MeanCI(
        mean=mean,
        halfwidth=z * math.sqrt(variance / trials),
        degenerate=variance == 0.0,
    )
