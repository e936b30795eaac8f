"""Deterministic, shardable Monte Carlo experiments over random networks.

Trials are statically partitioned into ``workers`` contiguous blocks; block
``k`` draws from stream ``2k`` and feeds its kink-position reservoir from
stream ``2k + 1``, so results are bit-identical for a fixed
``(seed, workers, trials)`` triple no matter how the blocks are scheduled.
Partial results merge single-threaded at the end, in block order (stream
``2 * workers`` drives the reservoir merge).

Each trial conceptually samples a network and counts its kinks.  The engine
draws the first layer at unit scale and takes breakpoints as ``-bias/weight``
ratios of those unit draws, which the model scale would cancel out of anyway;
output-layer draws are skipped since they cannot move kinks.  Histograms and
radius samples are therefore exactly identical across scale parameters, not
just statistically indistinguishable.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

from . import stats
from ._kernels import collect_kinks_batch, count_kinks_batch
from .network import KINK_MERGE_TOL, DomainRadius
from .sampling import (
    ParamDistribution,
    RngStream,
    derive_generator_seed,
    distribution_from_kind,
    unit_first_layer_draws,
)
from .theory import (
    ShapeKind,
    UnsupportedModelError,
    hit_probability,
    kink_count_pmf,
    kink_radius_cdf,
    spherical_expected_exact,
)

SUMMARY_SCHEMA_VERSION = "1"

# Rows per kernel batch; fixed, hence part of the determinism contract.
BATCH_ROWS = 65536

DEFAULT_RADII_CAP = 100_000


class ConfigMismatchError(ValueError):
    """Summaries with incompatible configurations cannot be merged."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment."""

    distribution: ParamDistribution
    width: int
    domain: DomainRadius
    trials: int
    seed: int
    workers: int = 1
    collect_radii: bool = False
    radii_cap: int = DEFAULT_RADII_CAP

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be a positive integer")
        if self.workers < 1:
            raise ValueError("workers must be a positive integer")
        if self.trials < self.workers:
            raise ValueError("trials must be at least the number of workers")
        if self.collect_radii and self.radii_cap < 1:
            raise ValueError("radii_cap must be positive when collecting radii")


@dataclass(frozen=True)
class MonteCarloSummary:
    """Aggregated result of an experiment (or a merge of experiments).

    ``config`` echoes provenance; ``trials`` is authoritative (after merges
    the echoed seed/workers describe the left operand's run).  ``kink_sample``
    holds reservoir-sampled signed kink positions when produced in-process;
    only magnitudes survive a JSON round trip.  ``radii_sample`` exposes the
    magnitudes, which is what the radial distribution tests consume.
    """

    config: ExperimentConfig
    count_histogram: np.ndarray
    trials: int
    empirical_mean: float
    empirical_variance: float
    kink_sample: np.ndarray

    def __post_init__(self):
        hist = np.asarray(self.count_histogram, dtype=np.int64).copy()
        hist.flags.writeable = False
        object.__setattr__(self, "count_histogram", hist)
        sample = np.asarray(self.kink_sample, dtype=np.float64).copy()
        sample.flags.writeable = False
        object.__setattr__(self, "kink_sample", sample)
        if hist.shape != (self.config.width + 1,):
            raise ValueError("count_histogram must have width + 1 cells")
        if int(hist.sum()) != self.trials:
            raise ValueError("count_histogram must sum to trials")

    @property
    def radii_sample(self) -> np.ndarray:
        return np.abs(self.kink_sample)


def _moments(hist: np.ndarray) -> tuple[float, float]:
    n = int(hist.sum())
    if n == 0:
        return 0.0, 0.0
    values = np.arange(hist.shape[0], dtype=np.float64)
    mean = float(values @ hist) / n
    if n < 2:
        return mean, 0.0
    sum_sq = float((values * values) @ hist)
    return mean, max(sum_sq - n * mean * mean, 0.0) / (n - 1)


class _Reservoir:
    """Uniform fixed-capacity sample of a stream (algorithm R, batched)."""

    def __init__(self, capacity: int, rng: np.random.Generator):
        self.capacity = capacity
        self.rng = rng
        self.items = np.empty(capacity, dtype=np.float64)
        self.size = 0
        self.seen = 0

    def extend(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        fill = min(self.capacity - self.size, values.size)
        if fill:
            self.items[self.size : self.size + fill] = values[:fill]
            self.size += fill
            self.seen += fill
            values = values[fill:]
        if values.size == 0:
            return
        # item with 1-based stream index t replaces slot j ~ U{0..t-1} if j < cap
        indices = self.seen + 1 + np.arange(values.size, dtype=np.int64)
        slots = self.rng.integers(0, indices)
        for k in np.flatnonzero(slots < self.capacity):
            self.items[slots[k]] = values[k]
        self.seen += values.size

    def array(self) -> np.ndarray:
        return self.items[: self.size].copy()


def _shard_sizes(trials: int, workers: int) -> list[int]:
    base, extra = divmod(trials, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


def _run_shard(config: ExperimentConfig, worker: int, shard_trials: int):
    """One worker block: returns ``(histogram, signed kink sample)``."""
    gen = RngStream(config.seed, 2 * worker).generator()
    reservoir = (
        _Reservoir(config.radii_cap, RngStream(config.seed, 2 * worker + 1).generator())
        if config.collect_radii
        else None
    )
    width = config.width
    radius = config.domain.radius
    hist = np.zeros(width + 1, dtype=np.int64)
    remaining = shard_trials
    while remaining > 0:
        rows = min(BATCH_ROWS, remaining)
        weights, biases = unit_first_layer_draws(config.distribution, width, rows, gen)
        if reservoir is not None:
            counts, positions = collect_kinks_batch(biases, weights, radius, KINK_MERGE_TOL)
            reservoir.extend(positions)
        else:
            counts = count_kinks_batch(biases, weights, radius, KINK_MERGE_TOL)
        hist += np.bincount(counts, minlength=width + 1)
        remaining -= rows
    return hist, (reservoir.array() if reservoir is not None else np.empty(0))


def _merge_raw_samples(
    sample_a: np.ndarray,
    trials_a: int,
    sample_b: np.ndarray,
    trials_b: int,
    capacity: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Merge two reservoir samples, weighting by trial counts.

    When the union fits within capacity it is kept outright, so nothing is
    lost in the common all-data regime.  Otherwise the split is a
    trials-weighted binomial draw (clipped to availability) and
    order-preserving random subsets are taken from each side.
    """
    size_a, size_b = sample_a.size, sample_b.size
    keep = min(capacity, size_a + size_b)
    if keep == size_a + size_b:
        return np.concatenate([sample_a, sample_b])
    lo = max(0, keep - size_b)
    hi = min(keep, size_a)
    weight = trials_a / (trials_a + trials_b)
    from_a = int(np.clip(rng.binomial(keep, weight), lo, hi))
    picks_a = np.sort(rng.choice(size_a, size=from_a, replace=False))
    picks_b = np.sort(rng.choice(size_b, size=keep - from_a, replace=False))
    return np.concatenate([sample_a[picks_a], sample_b[picks_b]])


def run_experiment(config: ExperimentConfig) -> MonteCarloSummary:
    """Run the experiment; bit-identical output for equal configurations."""
    sizes = _shard_sizes(config.trials, config.workers)
    if config.workers == 1:
        partials = [_run_shard(config, 0, sizes[0])]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_run_shard, config, worker, size)
                for worker, size in enumerate(sizes)
            ]
            partials = [f.result() for f in futures]
    hist = np.zeros(config.width + 1, dtype=np.int64)
    for partial_hist, _ in partials:
        hist += partial_hist
    merge_rng = RngStream(config.seed, 2 * config.workers).generator()
    sample, sample_trials = partials[0][1], sizes[0]
    for (_, partial_sample), size in zip(partials[1:], sizes[1:]):
        sample = _merge_raw_samples(
            sample, sample_trials, partial_sample, size, config.radii_cap, merge_rng
        )
        sample_trials += size
    mean, variance = _moments(hist)
    return MonteCarloSummary(
        config=config,
        count_histogram=hist,
        trials=config.trials,
        empirical_mean=mean,
        empirical_variance=variance,
        kink_sample=sample,
    )


def empty_summary(config: ExperimentConfig) -> MonteCarloSummary:
    """A zero-trial summary: the identity element for merging."""
    return MonteCarloSummary(
        config=config,
        count_histogram=np.zeros(config.width + 1, dtype=np.int64),
        trials=0,
        empirical_mean=0.0,
        empirical_variance=0.0,
        kink_sample=np.empty(0),
    )


def merge_summaries(
    a: MonteCarloSummary, b: MonteCarloSummary, rng: np.random.Generator | None = None
) -> MonteCarloSummary:
    """Combine two summaries of the same model shape, width, and domain.

    Histograms and trial counts add exactly (histogram merging is
    associative); moments are recomputed from the merged histogram; kink
    reservoirs merge with weight proportional to trials.  Scale parameters
    may differ between operands, since kink statistics do not depend on
    them.  Without an explicit ``rng`` the reservoir merge is seeded
    deterministically from both operands' provenance.
    """
    ca, cb = a.config, b.config
    if (
        ca.distribution.kind is not cb.distribution.kind
        or ca.width != cb.width
        or ca.domain != cb.domain
    ):
        raise ConfigMismatchError("summaries differ in shape, width, or domain")
    if rng is None:
        rng = np.random.Generator(
            np.random.PCG64(
                derive_generator_seed(
                    derive_generator_seed(ca.seed, a.trials),
                    derive_generator_seed(cb.seed, b.trials),
                )
            )
        )
    hist = a.count_histogram + b.count_histogram
    trials = a.trials + b.trials
    mean, variance = _moments(hist)
    return MonteCarloSummary(
        # the echoed trials never drops below workers, so a merge of empty
        # summaries still carries a constructible config
        config=replace(ca, trials=max(trials, ca.workers)),
        count_histogram=hist,
        trials=trials,
        empirical_mean=mean,
        empirical_variance=variance,
        kink_sample=_merge_raw_samples(
            a.kink_sample, a.trials, b.kink_sample, b.trials, ca.radii_cap, rng
        ),
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Bundle of statistical tests of a summary against the closed forms."""

    alpha: float
    chi_square: stats.GofReport | None
    mean_test: stats.GofReport | None
    radius_ks: stats.GofReport | None

    @property
    def all_passed(self) -> bool:
        reports = (self.chi_square, self.mean_test, self.radius_ks)
        return all(r.passed for r in reports if r is not None)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "chi_square": self.chi_square.to_json_dict() if self.chi_square else None,
            "mean_test": self.mean_test.to_json_dict() if self.mean_test else None,
            "radius_ks": self.radius_ks.to_json_dict() if self.radius_ks else None,
            "all_pass": self.all_passed,
        }


def _mean_z_report(observed_mean: float, expected: float, se: float, alpha: float):
    threshold = float(ndtri(1.0 - alpha / 2.0))
    if se == 0.0:
        statistic = 0.0 if observed_mean == expected else math.inf
    else:
        statistic = abs(observed_mean - expected) / se
    return stats.GofReport.evaluate("mean_z", statistic, 1, threshold, alpha)


def compare_to_theory(summary: MonteCarloSummary, alpha: float = 0.001) -> ComparisonReport:
    """Test a summary against the applicable closed-form predictions.

    Finite domains: chi-square GOF of the count histogram against the
    binomial law plus a z-test of the mean (rectangular/Gaussian), or the
    mean test alone (spherical, which has no closed-form PMF and covers only
    ``R <= 1``).  Unbounded domains: KS test of pooled kink magnitudes
    against the radial CDF, which requires collected radii and excludes the
    spherical model.
    """
    config = summary.config
    kind = config.distribution.kind
    width = config.width
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")

    if not config.domain.is_finite:
        if kind is ShapeKind.SPHERICAL:
            raise UnsupportedModelError(
                "no unbounded-domain radial law exists for the spherical model"
            )
        radii = summary.radii_sample
        if radii.size == 0:
            raise ValueError("radius KS comparison requires collected radii")
        statistic = stats.ks_statistic(radii, lambda r: kink_radius_cdf(kind, r))
        threshold = stats.kolmogorov_critical(radii.size, alpha)
        report = stats.GofReport.evaluate(
            "radius_ks", statistic, radii.size, threshold, alpha
        )
        return ComparisonReport(alpha=alpha, chi_square=None, mean_test=None, radius_ks=report)

    radius = config.domain.radius
    if kind is ShapeKind.SPHERICAL:
        expected = spherical_expected_exact(width, radius)  # rejects R > 1
        se = math.sqrt(summary.empirical_variance / summary.trials)
        mean_report = _mean_z_report(summary.empirical_mean, expected, se, alpha)
        return ComparisonReport(
            alpha=alpha, chi_square=None, mean_test=mean_report, radius_ks=None
        )

    p = hit_probability(kind, radius)
    pmf = kink_count_pmf(width, p)
    statistic, dof = stats.chi_square_statistic(summary.count_histogram, pmf, summary.trials)
    chi_report = stats.GofReport.evaluate(
        "chi_square_gof", statistic, dof, stats.chi_square_critical(dof, alpha), alpha
    )
    se = math.sqrt(width * p * (1.0 - p) / summary.trials)
    mean_report = _mean_z_report(summary.empirical_mean, width * p, se, alpha)
    return ComparisonReport(
        alpha=alpha, chi_square=chi_report, mean_test=mean_report, radius_ks=None
    )


def summary_to_json_dict(summary: MonteCarloSummary) -> dict:
    """Serialize to the published summary schema (radii as magnitudes)."""
    config = summary.config
    return {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "config": {
            "shape": config.distribution.kind.value,
            "scale": config.distribution.scale,
            "width": config.width,
            "radius": config.domain.radius if config.domain.is_finite else None,
            "trials": config.trials,
            "seed": config.seed,
            "workers": config.workers,
            "collect_radii": config.collect_radii,
            "radii_cap": config.radii_cap,
        },
        "count_histogram": [int(c) for c in summary.count_histogram],
        "trials": summary.trials,
        "empirical_mean": summary.empirical_mean,
        "empirical_variance": summary.empirical_variance,
        "radii_sample": [float(r) for r in summary.radii_sample],
    }


def summary_from_json_dict(data: dict) -> MonteCarloSummary:
    """Inverse of :func:`summary_to_json_dict` (signs are not recoverable)."""
    raw = data["config"]
    config = ExperimentConfig(
        distribution=distribution_from_kind(ShapeKind(raw["shape"]), raw["scale"]),
        width=int(raw["width"]),
        domain=DomainRadius.finite(raw["radius"])
        if raw["radius"] is not None
        else DomainRadius.unbounded(),
        trials=int(raw["trials"]),
        seed=int(raw["seed"]),
        workers=int(raw["workers"]),
        collect_radii=bool(raw["collect_radii"]),
        radii_cap=int(raw["radii_cap"]),
    )
    return MonteCarloSummary(
        config=config,
        count_histogram=np.asarray(data["count_histogram"], dtype=np.int64),
        trials=int(data["trials"]),
        empirical_mean=float(data["empirical_mean"]),
        empirical_variance=float(data["empirical_variance"]),
        kink_sample=np.asarray(data["radii_sample"], dtype=np.float64),
    )
