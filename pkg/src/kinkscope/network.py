"""Exact piecewise-linear analysis of one-hidden-layer ReLU networks.

A width-``w`` network with parameters ``(first_weights, first_biases,
out_weights, out_bias)`` computes

    f(x) = out_bias + sum_j out_weights[j] * relu(first_biases[j] + x * first_weights[j])

which is continuous and piecewise linear.  Neuron ``j`` can bend the graph
only at ``-first_biases[j] / first_weights[j]``, so there are at most ``w``
points of non-linearity and they can be read off exactly; a grid-based
slope-change counter provides an independent numeric cross-check.  The output
layer moves values around but never creates or destroys kinks (away from the
measure-zero set where an output weight is exactly zero), which is why kink
extraction ignores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import collect_kinks_batch

# Absolute merge tolerance for coincident kink candidates.  Coincidences are
# measure-zero under every supported parameter model; this only guards
# floating-point ties.
KINK_MERGE_TOL = 1e-12

# Slope changes below this fraction of the largest secant slope are noise.
SLOPE_CHANGE_REL_TOL = 1e-9


class GridResolutionError(RuntimeError):
    """The evaluation grid is too coarse to separate adjacent kinks."""


def _readonly(values, name: str, length: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class NetworkParams:
    """One draw of network parameters defining a function from R to R."""

    width: int
    first_weights: np.ndarray
    first_biases: np.ndarray
    out_weights: np.ndarray
    out_bias: float

    def __post_init__(self):
        if not isinstance(self.width, (int, np.integer)) or self.width < 1:
            raise ValueError(f"width must be a positive integer, got {self.width!r}")
        object.__setattr__(self, "width", int(self.width))
        for name in ("first_weights", "first_biases", "out_weights"):
            object.__setattr__(self, name, _readonly(getattr(self, name), name, self.width))
        bias = float(self.out_bias)
        if not math.isfinite(bias):
            raise ValueError("out_bias must be finite")
        object.__setattr__(self, "out_bias", bias)

    def __eq__(self, other):
        if not isinstance(other, NetworkParams):
            return NotImplemented
        return (
            self.width == other.width
            and np.array_equal(self.first_weights, other.first_weights)
            and np.array_equal(self.first_biases, other.first_biases)
            and np.array_equal(self.out_weights, other.out_weights)
            and self.out_bias == other.out_bias
        )


@dataclass(frozen=True)
class DomainRadius:
    """Symmetric open input domain ``(-radius, radius)``; ``inf`` means all of R."""

    radius: float

    def __post_init__(self):
        radius = float(self.radius)
        if math.isnan(radius) or radius <= 0.0:
            raise ValueError(f"domain radius must be positive, got {radius!r}")
        object.__setattr__(self, "radius", radius)

    @classmethod
    def finite(cls, radius: float) -> "DomainRadius":
        radius = float(radius)
        if not math.isfinite(radius):
            raise ValueError("finite domain requires a finite radius")
        return cls(radius)

    @classmethod
    def unbounded(cls) -> "DomainRadius":
        return cls(math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.radius)

    def contains(self, x: float) -> bool:
        return -self.radius < x < self.radius


@dataclass(frozen=True)
class KinkReport:
    """Sorted points of non-linearity found strictly inside a domain."""

    positions: np.ndarray
    count: int

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.float64).copy()
        positions.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        if self.count != positions.shape[0]:
            raise ValueError("count must equal the number of positions")
        if positions.shape[0] > 1 and not np.all(np.diff(positions) > 0):
            raise ValueError("positions must be strictly increasing")


def eval_network(params: NetworkParams, x):
    """Evaluate the network at ``x`` (scalar or 1-D array of scalars).

    Scalar and batched calls share one reduction, so they agree bit for bit.
    """
    arr = np.asarray(x, dtype=np.float64)
    points = arr.reshape(-1)
    pre = params.first_biases[None, :] + points[:, None] * params.first_weights[None, :]
    values = params.out_bias + (np.maximum(pre, 0.0) * params.out_weights[None, :]).sum(axis=1)
    return float(values[0]) if arr.ndim == 0 else values


def kink_positions(params: NetworkParams, domain: DomainRadius) -> KinkReport:
    """Exact sorted points of non-linearity inside the open domain.

    Neuron ``j`` contributes ``-first_biases[j] / first_weights[j]`` when its
    weight is non-zero; candidates within ``KINK_MERGE_TOL`` of their sorted
    predecessor merge into one position.  The output layer is ignored (it
    cannot create kinks, and destroys one only on a measure-zero parameter
    set; ``slope_change_oracle`` exists to validate that convention).
    """
    counts, positions = collect_kinks_batch(
        params.first_biases[None, :],
        params.first_weights[None, :],
        domain.radius,
        KINK_MERGE_TOL,
    )
    return KinkReport(positions=positions, count=int(counts[0]))


def slope_change_oracle(
    params: NetworkParams, domain: DomainRadius, grid_points: int
) -> int:
    """Count kinks numerically from secant-slope changes on a uniform grid.

    Independent of the analytic path: evaluates the network at ``grid_points``
    equispaced points over the closed domain and counts the slope-change
    events among successive secants.  A kink strictly inside a grid cell
    perturbs the two secants touching that cell, so flagged gaps are grouped
    into runs and each run counts once; the count therefore equals the
    analytic one whenever kinks are separated by more than two grid cells
    (and none cancels).  Raises :class:`GridResolutionError` when two
    analytic kinks share a grid cell, in which case the caller must refine
    the grid.
    """
    if not domain.is_finite:
        raise ValueError("the slope-change oracle needs a finite domain")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    xs = np.linspace(-domain.radius, domain.radius, grid_points)
    step = xs[1] - xs[0]

    analytic = kink_positions(params, domain)
    if analytic.count >= 2 and np.min(np.diff(analytic.positions)) <= step:
        raise GridResolutionError(
            f"two kinks closer than one grid cell ({step:.3g}); refine the grid"
        )

    ys = eval_network(params, xs)
    slopes = np.diff(ys) / step
    changes = np.abs(np.diff(slopes))
    # secant noise scales like eps * |f| / step, hence the absolute floor
    threshold = SLOPE_CHANGE_REL_TOL * np.max(np.abs(slopes), initial=0.0) + (
        32.0 * np.finfo(np.float64).eps * np.max(np.abs(ys), initial=0.0) / step
    )
    flagged = changes > threshold
    run_starts = flagged & ~np.concatenate([[False], flagged[:-1]])
    return int(np.count_nonzero(run_starts))
