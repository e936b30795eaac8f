"""Closed-form laws for kinks of random one-hidden-layer ReLU networks.

A width-``w`` network bends its output at ``-bias/weight`` per neuron, so on
the interval ``(-R, R)`` the kink count is governed by the probability that a
single neuron's breakpoint lands inside the interval.  For the rectangular
(i.i.d. uniform box) and Gaussian (i.i.d. centred normal) parameter models
that per-neuron hit probability has an elementary closed form and the kink
count is exactly ``Binomial(w, P)``.  For the spherical model (weight vector
uniform in a ball, uniform biases) only the expected count is available in
closed form, via classical integral geometry: counting kinks is counting
crossings of a random needle with a grid of parallel hyperplanes.

All hit probabilities and kink laws are independent of the scale parameter of
the model (box half-width, normal variance, ball radius); only the shape of
the parameter distribution matters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln


class ShapeKind(enum.Enum):
    """The three supported shapes of the parameter distribution."""

    RECTANGULAR = "rectangular"
    GAUSSIAN = "gaussian"
    SPHERICAL = "spherical"


class UnsupportedModelError(ValueError):
    """The requested quantity has no closed form under this model."""


class TheoryRangeError(ValueError):
    """The requested parameters fall outside the range the formulas cover."""


def _check_width(width: int) -> int:
    if not isinstance(width, (int, np.integer)) or width < 1:
        raise ValueError(f"width must be a positive integer, got {width!r}")
    return int(width)


def _check_finite_radius(radius: float) -> float:
    radius = float(radius)
    if not math.isfinite(radius) or radius <= 0.0:
        raise ValueError(f"domain radius must be finite and positive, got {radius!r}")
    return radius


def _abs_ratio_cdf(shape: ShapeKind, r):
    """P(|breakpoint| <= r) for one neuron; shared by the hit probability and
    the radial CDF so the two are the same function by construction."""
    if shape is ShapeKind.RECTANGULAR:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r <= 1.0, r / 2.0, 1.0 - 1.0 / (2.0 * r))
    if shape is ShapeKind.GAUSSIAN:
        return (2.0 / math.pi) * np.arctan(r)
    raise UnsupportedModelError(
        "no per-neuron hit probability is available for the spherical model"
    )


def hit_probability(shape: ShapeKind, radius: float) -> float:
    """Probability that one neuron's breakpoint falls inside ``(-R, R)``.

    Rectangular model: ``R/2`` for ``R <= 1`` and ``1 - 1/(2R)`` for
    ``R >= 1`` (the branches agree at ``R = 1``).  Gaussian model:
    ``(2/pi) * arctan(R)``, the half-Cauchy CDF, because the breakpoint is a
    ratio of two centred normals.  The spherical model is not supported.
    """
    radius = _check_finite_radius(radius)
    return float(_abs_ratio_cdf(shape, radius))


def kink_radius_cdf(shape: ShapeKind, r):
    """CDF of a single kink's magnitude ``|x|`` on the unbounded domain.

    Identical to :func:`hit_probability` evaluated at ``r``; accepts scalars
    or arrays, with ``r >= 0``.
    """
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValueError("r must be finite and non-negative")
    out = _abs_ratio_cdf(shape, arr)
    return float(out) if np.isscalar(r) or arr.ndim == 0 else np.asarray(out)


def kink_radius_pdf(shape: ShapeKind, r):
    """Density of a single kink's magnitude ``|x|`` on the unbounded domain.

    Rectangular: ``1/2`` on ``[0, 1]`` and ``1/(2 r^2)`` beyond (the law of a
    ratio of two independent uniform magnitudes).  Gaussian: the half-Cauchy
    density ``2 / (pi (1 + r^2))``.  Each integrates to 1 over ``[0, inf)``;
    multiply by the width for the per-network kink intensity.
    """
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValueError("r must be finite and non-negative")
    if shape is ShapeKind.RECTANGULAR:
        with np.errstate(divide="ignore"):
            out = np.where(arr <= 1.0, 0.5, 0.5 / (arr * arr))
    elif shape is ShapeKind.GAUSSIAN:
        out = 2.0 / (math.pi * (1.0 + arr * arr))
    else:
        raise UnsupportedModelError(
            "no kink-position density is available for the spherical model"
        )
    return float(out) if np.isscalar(r) or arr.ndim == 0 else np.asarray(out)


def kink_radius_intensity(shape: ShapeKind, width: int, r):
    """Expected number of kinks per unit radius: ``width * kink_radius_pdf``.

    On the unbounded domain all ``width`` kinks exist almost surely, so the
    radial intensity integrates to ``width``.
    """
    return _check_width(width) * kink_radius_pdf(shape, r)


def kink_count_pmf(width: int, hit_prob: float) -> np.ndarray:
    """Binomial(width, hit_prob) PMF over 0..width kinks, in log space.

    Valid for the rectangular and Gaussian models, where neurons hit the
    domain independently.
    """
    width = _check_width(width)
    p = float(hit_prob)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"hit probability must lie in [0, 1], got {p!r}")
    k = np.arange(width + 1, dtype=float)
    if p == 0.0 or p == 1.0:
        pmf = np.zeros(width + 1)
        pmf[width if p == 1.0 else 0] = 1.0
        return pmf
    log_binom = gammaln(width + 1.0) - gammaln(k + 1.0) - gammaln(width - k + 1.0)
    return np.exp(log_binom + k * math.log(p) + (width - k) * math.log1p(-p))


def expected_kinks(shape: ShapeKind, width: int, radius: float) -> float:
    """Expected number of kinks in ``(-R, R)``.

    ``width * hit_probability`` for the rectangular and Gaussian models; the
    spherical model dispatches to :func:`spherical_expected_exact` and is
    only covered for ``R <= 1``.
    """
    width = _check_width(width)
    if shape is ShapeKind.SPHERICAL:
        return spherical_expected_exact(width, radius)
    return width * hit_probability(shape, radius)


def spherical_expected_exact(width: int, radius: float) -> float:
    """Exact expected kink count for the spherical model, ``0 < R <= 1``.

    Even width:  ``R w 2^w / ((w+1) pi) / C(w-1, w/2)``.
    Odd width:   ``R w^2 / (2^(w-1) (w+1)) * C(w-1, (w-1)/2)``.

    The binomial-coefficient core is evaluated in exact integer arithmetic
    and rounded once, so there is no overflow for any practical width and
    ``width = 1`` reproduces the rectangular value ``R/2`` bit for bit.
    """
    width = _check_width(width)
    radius = _check_finite_radius(radius)
    if radius > 1.0:
        raise TheoryRangeError(
            f"spherical expectation is only available for R <= 1, got R={radius}"
        )
    if width % 2 == 0:
        core = Fraction(
            width * 2**width, (width + 1) * math.comb(width - 1, width // 2)
        )
        return radius * float(core) / math.pi
    core = Fraction(
        width * width * math.comb(width - 1, (width - 1) // 2),
        2 ** (width - 1) * (width + 1),
    )
    return radius * float(core)


def spherical_expected_asymptotic(width: int, radius: float) -> float:
    """Large-width limit ``R * sqrt(2 w / pi)`` of the spherical expectation.

    The ratio of exact to asymptotic tends to 1 as the width grows, at rate
    O(1/w); unlike the exact formula this is meaningful for any ``R > 0``.
    """
    width = _check_width(width)
    radius = float(radius)
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    return radius * math.sqrt(2.0 * width / math.pi)


def _log_unit_ball_volume(n: int) -> float:
    """log of the unit n-ball volume, via the even/odd factorial forms."""
    if n % 2 == 0:
        k = n // 2
        return k * math.log(math.pi) - gammaln(k + 1.0)
    k = (n - 1) // 2
    return (
        (2 * k + 1) * math.log(2.0)
        + k * math.log(math.pi)
        + gammaln(k + 1.0)
        - gammaln(2 * k + 2.0)
    )


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in dimension ``n`` (``n = 0`` gives 1).

    Uses ``pi^k / k!`` for ``n = 2k`` and ``2^(2k+1) pi^k k! / (2k+1)!`` for
    ``n = 2k + 1``, evaluated in log space; underflows to 0 for very large
    ``n``, where the true value drops below the double range.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"dimension must be a non-negative integer, got {n!r}")
    return math.exp(_log_unit_ball_volume(int(n)))


def needle_crossing_coefficient(width: int) -> float:
    """Normalized expected crossings of a random needle with a hyperplane grid.

    For a needle of half-length ``s`` dropped uniformly in ``R^width`` against
    parallel hyperplanes with spacing ``2T``, the expected number of crossings
    is ``coefficient * s / T``.  Two equivalent forms are evaluated and must
    agree to 1e-10 relative:

    * ball-volume form: ``2 * V(width-1) / (width * V(width))`` with ``V`` the
      unit-ball volume;
    * binomial form: ``2^w / (w pi) / C(w-1, w/2)`` (even ``w``) or
      ``C(w-1, (w-1)/2) / 2^(w-1)`` (odd ``w``).

    Returns the exactly-rounded binomial form.
    """
    width = _check_width(width)
    volume_form = math.exp(
        math.log(2.0)
        + _log_unit_ball_volume(width - 1)
        - math.log(width)
        - _log_unit_ball_volume(width)
    )
    if width % 2 == 0:
        binomial_form = (
            float(Fraction(2**width, width * math.comb(width - 1, width // 2)))
            / math.pi
        )
    else:
        binomial_form = float(
            Fraction(math.comb(width - 1, (width - 1) // 2), 2 ** (width - 1))
        )
    if abs(volume_form - binomial_form) > 1e-10 * binomial_form:
        raise ArithmeticError(
            f"needle coefficient forms disagree at width {width}: "
            f"{volume_form!r} vs {binomial_form!r}"
        )
    return binomial_form


def ball_volume(width: int, radius: float) -> float:
    """Volume ``pi^(w/2) / Gamma(w/2 + 1) * r^w`` of a radius-``r`` ball."""
    width = _check_width(width)
    radius = _check_finite_radius(radius)
    return math.exp(
        0.5 * width * math.log(math.pi)
        - gammaln(0.5 * width + 1.0)
        + width * math.log(radius)
    )


def sphere_area(width: int, radius: float) -> float:
    """Surface area ``2 pi^(w/2) / Gamma(w/2) * r^(w-1)`` of a radius-``r``
    sphere in dimension ``width``; the radial derivative of
    :func:`ball_volume`."""
    width = _check_width(width)
    radius = _check_finite_radius(radius)
    return math.exp(
        math.log(2.0)
        + 0.5 * width * math.log(math.pi)
        - gammaln(0.5 * width)
        + (width - 1) * math.log(radius)
    )


@dataclass(frozen=True)
class Prediction:
    """Closed-form prediction bundle for one (shape, width, radius) triple.

    ``hit_probability`` and ``pmf`` are ``None`` for the spherical model,
    where only the mean is available.
    """

    width: int
    hit_probability: float | None
    pmf: np.ndarray | None
    mean: float

    def __post_init__(self):
        if self.pmf is not None:
            pmf = np.asarray(self.pmf, dtype=float)
            pmf.flags.writeable = False
            object.__setattr__(self, "pmf", pmf)
            if pmf.shape != (self.width + 1,):
                raise ValueError("pmf must have width + 1 entries")
            if np.any(pmf < 0.0):
                raise ValueError("pmf entries must be non-negative")
            # rounding in the log-space pmf accumulates with width; the strict
            # 1e-12 identities hold comfortably through width 64
            if abs(float(pmf.sum()) - 1.0) > max(1e-12, 1e-15 * self.width):
                raise ValueError("pmf must sum to 1")
            mass_mean = float(np.arange(self.width + 1) @ pmf)
            if abs(mass_mean - self.mean) > max(1e-12, 1e-15 * self.width**2):
                raise ValueError("mean is inconsistent with the pmf")
        if not 0.0 <= self.mean <= self.width:
            raise ValueError("mean must lie in [0, width]")


def make_prediction(shape: ShapeKind, width: int, radius: float) -> Prediction:
    """Assemble the full prediction for a finite domain radius."""
    width = _check_width(width)
    if shape is ShapeKind.SPHERICAL:
        return Prediction(
            width=width,
            hit_probability=None,
            pmf=None,
            mean=spherical_expected_exact(width, radius),
        )
    p = hit_probability(shape, radius)
    return Prediction(
        width=width,
        hit_probability=p,
        pmf=kink_count_pmf(width, p),
        mean=width * p,
    )
