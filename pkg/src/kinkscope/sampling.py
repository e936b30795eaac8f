"""Seeded, reproducible parameter sampling for the three random models.

Models (all scales strictly positive):

* :class:`Rectangular` — every first-layer weight and bias i.i.d.
  ``Uniform(-T, T)`` with ``T = half_width``.
* :class:`Gaussian` — every first-layer weight and bias i.i.d.
  ``Normal(0, variance)``.
* :class:`Spherical` — the whole weight vector uniform in the solid ball of
  radius ``ball_radius`` in ``R^w``; biases i.i.d. uniform on the symmetric
  interval of the same half-width.

Output-layer parameters never influence kink counts, so the models do not
prescribe them; here they are drawn i.i.d. from the model's scalar marginal
(uniform for rectangular/spherical, normal for Gaussian), which keeps
end-to-end evaluation meaningful.

Reproducibility contract: a stream is identified by ``(seed, stream_id)``;
equal identifiers replay the identical draw sequence, distinct ``stream_id``
values under one seed give statistically independent streams (the identifier
is mixed into a single PCG64 seed by a splitmix64-style hash, so parallel
shards need no coordination).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .network import NetworkParams
from .theory import ShapeKind

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_generator_seed(seed: int, stream_id: int) -> int:
    """Mix ``(seed, stream_id)`` into one 64-bit generator seed."""
    return _splitmix64(_splitmix64(seed & _MASK64) ^ (stream_id & _MASK64))


@dataclass(frozen=True)
class RngStream:
    """Identifier of one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)):
            raise ValueError("seed must be an integer")
        if not isinstance(self.stream_id, (int, np.integer)) or self.stream_id < 0:
            raise ValueError("stream_id must be a non-negative integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(
            np.random.PCG64(derive_generator_seed(self.seed, self.stream_id))
        )


def _check_scale(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Rectangular:
    """First-layer weights and biases i.i.d. Uniform(-half_width, half_width)."""

    half_width: float = 1.0
    kind: ClassVar[ShapeKind] = ShapeKind.RECTANGULAR

    def __post_init__(self):
        object.__setattr__(self, "half_width", _check_scale(self.half_width, "half_width"))

    @property
    def scale(self) -> float:
        return self.half_width


@dataclass(frozen=True)
class Gaussian:
    """First-layer weights and biases i.i.d. Normal(0, variance)."""

    variance: float = 1.0
    kind: ClassVar[ShapeKind] = ShapeKind.GAUSSIAN

    def __post_init__(self):
        object.__setattr__(self, "variance", _check_scale(self.variance, "variance"))

    @property
    def scale(self) -> float:
        return self.variance


@dataclass(frozen=True)
class Spherical:
    """Weight vector uniform in the radius-``ball_radius`` ball; uniform biases."""

    ball_radius: float = 1.0
    kind: ClassVar[ShapeKind] = ShapeKind.SPHERICAL

    def __post_init__(self):
        object.__setattr__(self, "ball_radius", _check_scale(self.ball_radius, "ball_radius"))

    @property
    def scale(self) -> float:
        return self.ball_radius


ParamDistribution = Union[Rectangular, Gaussian, Spherical]

_KIND_TO_CLASS = {
    ShapeKind.RECTANGULAR: Rectangular,
    ShapeKind.GAUSSIAN: Gaussian,
    ShapeKind.SPHERICAL: Spherical,
}


def distribution_from_kind(kind: ShapeKind, scale: float = 1.0) -> ParamDistribution:
    """Build the distribution of the given shape with the given scale."""
    return _KIND_TO_CLASS[kind](scale)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


def _unit_ball_rows(gen: np.random.Generator, rows: int, width: int) -> np.ndarray:
    """Rows uniform in the unit ball of ``R^width``.

    Direction from normalized i.i.d. standard normals, magnitude ``U^(1/w)``;
    no rejection, so high widths cost the same as low ones.  The
    probability-zero all-zero normal draw is redrawn.
    """
    z = gen.standard_normal((rows, width))
    norms = np.linalg.norm(z, axis=1)
    while True:
        bad = np.flatnonzero(norms == 0.0)
        if bad.size == 0:
            break
        z[bad] = gen.standard_normal((bad.size, width))
        norms[bad] = np.linalg.norm(z[bad], axis=1)
    magnitudes = gen.random(rows) ** (1.0 / width)
    return z * (magnitudes / norms)[:, None]


def sample_in_ball(width: int, radius: float, rng) -> np.ndarray:
    """One point uniform in the solid ball of the given radius in ``R^width``."""
    if width < 1:
        raise ValueError("width must be a positive integer")
    radius = _check_scale(radius, "radius")
    return radius * _unit_ball_rows(_as_generator(rng), 1, int(width))[0]


def unit_first_layer_draws(
    dist: ParamDistribution, width: int, rows: int, gen: np.random.Generator
):
    """Batch of unit-scale first-layer draws: ``(weights, biases)``.

    Each array has shape ``(rows, width)``.  Weights are drawn before biases.
    Scaling by the model's scale factor turns a row into the first layer of a
    sampled network; kink positions are ratios ``-bias/weight``, so they can
    be computed from these unit draws directly, which is what makes the Monte
    Carlo engine's scale invariance exact rather than approximate.
    """
    shape = (rows, width)
    if isinstance(dist, Rectangular):
        return gen.uniform(-1.0, 1.0, shape), gen.uniform(-1.0, 1.0, shape)
    if isinstance(dist, Gaussian):
        return gen.standard_normal(shape), gen.standard_normal(shape)
    if isinstance(dist, Spherical):
        return _unit_ball_rows(gen, rows, width), gen.uniform(-1.0, 1.0, shape)
    raise TypeError(f"unknown distribution {dist!r}")


def _scale_factor(dist: ParamDistribution) -> float:
    """Multiplier turning unit draws into model-scale parameters."""
    if isinstance(dist, Gaussian):
        return math.sqrt(dist.variance)
    return dist.scale


def sample_params(dist: ParamDistribution, width: int, rng) -> NetworkParams:
    """Draw one full parameter set under the given model.

    Draw order per call: first-layer weights, first-layer biases, output
    weights, output bias.  Identical ``(dist, width, seed, stream_id)``
    reproduce bit-identical parameters.
    """
    if width < 1:
        raise ValueError("width must be a positive integer")
    width = int(width)
    gen = _as_generator(rng)
    factor = _scale_factor(dist)
    weights_u, biases_u = unit_first_layer_draws(dist, width, 1, gen)
    if isinstance(dist, Gaussian):
        out_weights = factor * gen.standard_normal(width)
        out_bias = factor * gen.standard_normal()
    else:
        out_weights = factor * gen.uniform(-1.0, 1.0, width)
        out_bias = factor * gen.uniform(-1.0, 1.0)
    return NetworkParams(
        width=width,
        first_weights=factor * weights_u[0],
        first_biases=factor * biases_u[0],
        out_weights=out_weights,
        out_bias=float(out_bias),
    )
