"""Closed-form laws: frozen values, identities, and independent oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln

from kinkscope import (
    ShapeKind,
    TheoryRangeError,
    UnsupportedModelError,
    ball_volume,
    expected_kinks,
    hit_probability,
    kink_count_pmf,
    kink_radius_cdf,
    kink_radius_intensity,
    kink_radius_pdf,
    make_prediction,
    needle_crossing_coefficient,
    sphere_area,
    spherical_expected_asymptotic,
    spherical_expected_exact,
    unit_ball_volume,
)

RECT = ShapeKind.RECTANGULAR
GAUSS = ShapeKind.GAUSSIAN
SPHERE = ShapeKind.SPHERICAL


def exact_binomial_pmf(width, p_num, p_den):
    """Exact rational Binomial(width, p) PMF; independent of the log-space path."""
    p = Fraction(p_num, p_den)
    return [
        math.comb(width, k) * p**k * (1 - p) ** (width - k) for k in range(width + 1)
    ]


class TestHitProbability:
    def test_rectangular_at_one(self):
        assert hit_probability(RECT, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_gaussian_at_one(self):
        assert hit_probability(GAUSS, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_rectangular_large_branch(self):
        assert hit_probability(RECT, 4.0) == pytest.approx(0.875, abs=1e-15)

    def test_rectangular_branches_agree_at_threshold(self):
        below = hit_probability(RECT, 1.0 - 1e-12)
        above = hit_probability(RECT, 1.0 + 1e-12)
        assert below == pytest.approx(0.5, abs=1e-11)
        assert above == pytest.approx(0.5, abs=1e-11)

    @pytest.mark.parametrize("shape", [RECT, GAUSS])
    def test_strictly_increasing_and_limits(self, shape):
        grid = np.logspace(-3, 3, 200)
        values = [hit_probability(shape, r) for r in grid]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(0.0 < v < 1.0 for v in values)
        tol = 1e-5 if shape is RECT else 1e-6
        assert 1.0 - hit_probability(shape, 1e6) < tol

    def test_rejects_spherical_and_bad_radius(self):
        with pytest.raises(UnsupportedModelError):
            hit_probability(SPHERE, 1.0)
        for bad in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                hit_probability(RECT, bad)


class TestKinkCountPmf:
    def test_central_value_w10(self):
        pmf = kink_count_pmf(10, 0.5)
        assert pmf[5] == pytest.approx(252 / 1024, abs=1e-15)

    def test_matches_exact_rational_oracle(self):
        for width, (num, den) in [(10, (1, 2)), (7, (3, 10)), (25, (7, 8))]:
            pmf = kink_count_pmf(width, num / den)
            oracle = exact_binomial_pmf(width, num, den)
            assert np.allclose(pmf, [float(q) for q in oracle], rtol=1e-13, atol=0)

    def test_degenerate_endpoints(self):
        assert kink_count_pmf(3, 0.0).tolist() == [1.0, 0.0, 0.0, 0.0]
        assert kink_count_pmf(2, 1.0).tolist() == [0.0, 0.0, 1.0]

    @pytest.mark.parametrize("width", [1, 2, 5, 16, 33, 64])
    @pytest.mark.parametrize("p", np.round(np.arange(0.0, 1.01, 0.1), 1).tolist())
    def test_normalization_and_mean_identity(self, width, p):
        pmf = kink_count_pmf(width, p)
        assert np.all(pmf >= 0.0)
        assert abs(pmf.sum() - 1.0) <= 1e-12
        mean = float(np.arange(width + 1) @ pmf)
        assert abs(mean - width * p) <= 1e-12
        assert mean <= width + 1e-12

    def test_rejects_bad_probability(self):
        for bad in (-0.1, 1.1, math.nan):
            with pytest.raises(ValueError):
                kink_count_pmf(4, bad)


class TestExpectedKinks:
    def test_gaussian_example(self):
        assert expected_kinks(GAUSS, 10, 1.0) == pytest.approx(5.0, abs=1e-14)

    def test_rectangular_example(self):
        assert expected_kinks(RECT, 6, 0.5) == pytest.approx(1.5, abs=1e-14)

    def test_spherical_width_one_equals_rectangular(self):
        for radius in (0.1, 0.25, 0.5, 0.7777, 1.0):
            assert expected_kinks(SPHERE, 1, radius) == expected_kinks(RECT, 1, radius)

    def test_at_most_width(self):
        for shape in (RECT, GAUSS):
            for width in (1, 7, 40):
                for radius in (0.2, 1.0, 50.0):
                    assert expected_kinks(shape, width, radius) <= width
        for width in (1, 2, 3, 10, 25):
            assert expected_kinks(SPHERE, width, 1.0) <= width

    def test_spherical_out_of_range(self):
        with pytest.raises(TheoryRangeError):
            expected_kinks(SPHERE, 4, 1.5)
        with pytest.raises(ValueError):
            expected_kinks(RECT, 4, math.inf)


class TestSphericalExpectation:
    def test_even_width_two(self):
        assert spherical_expected_exact(2, 1.0) == pytest.approx(
            8.0 / (3.0 * math.pi), rel=1e-14
        )

    def test_odd_width_three(self):
        assert spherical_expected_exact(3, 1.0) == pytest.approx(9.0 / 8.0, rel=1e-15)

    def test_width_one_half_radius(self):
        assert spherical_expected_exact(1, 0.5) == 0.25

    def test_linear_in_radius(self):
        base = spherical_expected_exact(6, 1.0)
        for radius in (0.125, 0.5, 0.75):
            assert spherical_expected_exact(6, radius) == pytest.approx(
                radius * base, rel=1e-14
            )

    def test_log_gamma_oracle(self):
        # independent route through log-gamma arithmetic
        def oracle(width, radius):
            if width % 2 == 0:
                log_c = gammaln(width) - gammaln(width / 2 + 1) - gammaln(width / 2)
                return math.exp(
                    math.log(radius) + math.log(width) + width * math.log(2.0)
                    - math.log(width + 1) - math.log(math.pi) - log_c
                )
            half = (width - 1) // 2
            log_c = gammaln(width) - 2.0 * gammaln(half + 1)
            return math.exp(
                math.log(radius) + 2.0 * math.log(width)
                - (width - 1) * math.log(2.0) - math.log(width + 1) + log_c
            )

        for width in list(range(1, 120)) + [999, 1000, 9999, 10000]:
            value = spherical_expected_exact(width, 1.0)
            assert value == pytest.approx(oracle(width, 1.0), rel=1e-10)
            assert 0.0 < value < width

    def test_consistent_with_needle_coefficient(self):
        # E = R * w^2 / (w + 1) * coefficient is how the radial integration
        # over needle lengths composes; a third route to the same number
        for width in range(1, 64):
            composed = 0.7 * width * width / (width + 1) * needle_crossing_coefficient(width)
            assert spherical_expected_exact(width, 0.7) == pytest.approx(
                composed, rel=1e-13
            )

    def test_range_validation(self):
        with pytest.raises(TheoryRangeError):
            spherical_expected_exact(5, 1.0000001)
        for bad in (0.0, -0.5, math.nan, math.inf):
            with pytest.raises(ValueError):
                spherical_expected_exact(5, bad)


class TestAsymptotic:
    def test_width_two(self):
        assert spherical_expected_asymptotic(2, 1.0) == pytest.approx(
            math.sqrt(4.0 / math.pi), rel=1e-15
        )

    def test_ratio_tends_to_one(self):
        gaps = [
            abs(spherical_expected_exact(w, 1.0) / spherical_expected_asymptotic(w, 1.0) - 1.0)
            for w in (10, 100, 1000)
        ]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.02

    def test_linear_in_radius(self):
        base = spherical_expected_asymptotic(37, 1.0)
        for radius in (0.2, 1.7, 42.0):
            assert spherical_expected_asymptotic(37, radius) == pytest.approx(
                radius * base, rel=1e-15
            )


class TestRadialLaw:
    def test_rectangular_pdf_values(self):
        assert kink_radius_pdf(RECT, 0.5) == 0.5
        assert kink_radius_pdf(RECT, 2.0) == 0.125

    def test_gaussian_pdf_at_zero(self):
        assert kink_radius_pdf(GAUSS, 0.0) == pytest.approx(2.0 / math.pi, rel=1e-15)

    def test_cdf_is_hit_probability(self):
        # same closed forms, asserted as an exact identity
        radii = np.logspace(-4, 5, 100)
        for shape in (RECT, GAUSS):
            for r in radii:
                assert kink_radius_cdf(shape, r) == hit_probability(shape, float(r))

    def test_rectangular_cdf_values(self):
        assert kink_radius_cdf(RECT, 1.0) == 0.5
        assert kink_radius_cdf(RECT, 1e9) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("shape", [RECT, GAUSS])
    def test_pdf_integrates_to_one(self, shape):
        head = quad(lambda r: kink_radius_pdf(shape, r), 0.0, 1.0)[0]
        # u = 1/r maps [1, 1e6] onto [1e-6, 1] and keeps the integrand O(1)
        mid = quad(lambda u: kink_radius_pdf(shape, 1.0 / u) / (u * u), 1e-6, 1.0)[0]
        tail = 1.0 - kink_radius_cdf(shape, 1e6)
        assert head + mid + tail == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("shape", [RECT, GAUSS])
    def test_cdf_monotone_to_one(self, shape):
        grid = np.logspace(-3, 6, 400)
        values = kink_radius_cdf(shape, grid)
        assert np.all(np.diff(values) > 0)
        assert values[-1] > 1.0 - 1e-5

    def test_intensity_scales_pdf(self):
        # width 10 at r = 0: rectangular w/2 = 5, Gaussian 2w/pi
        assert kink_radius_intensity(RECT, 10, 0.0) == 5.0
        assert kink_radius_intensity(GAUSS, 10, 0.0) == pytest.approx(
            20.0 / math.pi, rel=1e-15
        )

    def test_vectorized_matches_scalar(self):
        grid = np.array([0.0, 0.3, 1.0, 2.5, 100.0])
        for shape in (RECT, GAUSS):
            vec = kink_radius_pdf(shape, grid)
            assert vec.tolist() == [kink_radius_pdf(shape, float(r)) for r in grid]

    def test_rejects_spherical_and_bad_input(self):
        with pytest.raises(UnsupportedModelError):
            kink_radius_pdf(SPHERE, 1.0)
        with pytest.raises(UnsupportedModelError):
            kink_radius_cdf(SPHERE, 1.0)
        with pytest.raises(ValueError):
            kink_radius_pdf(RECT, -0.5)
        with pytest.raises(ValueError):
            kink_radius_cdf(GAUSS, math.nan)


class TestGeometricConstants:
    def test_unit_ball_volumes(self):
        assert unit_ball_volume(0) == 1.0
        assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-15)
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)

    def test_ball_volume_agrees_with_unit_volume(self):
        for width in range(1, 21):
            assert ball_volume(width, 1.0) == pytest.approx(
                unit_ball_volume(width), rel=1e-12
            )

    def test_ball_and_sphere_values(self):
        assert ball_volume(3, 1.0) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)
        assert sphere_area(2, 1.0) == pytest.approx(2.0 * math.pi, rel=1e-14)

    def test_sphere_area_is_volume_derivative(self):
        for width in (1, 2, 3, 7, 12):
            for radius in (0.5, 1.0, 2.3):
                step = 1e-6 * radius
                secant = (
                    ball_volume(width, radius + step) - ball_volume(width, radius - step)
                ) / (2.0 * step)
                assert secant == pytest.approx(sphere_area(width, radius), rel=1e-6)

    def test_needle_coefficient_small_widths(self):
        assert needle_crossing_coefficient(1) == pytest.approx(1.0, rel=1e-14)
        assert needle_crossing_coefficient(2) == pytest.approx(2.0 / math.pi, rel=1e-14)
        assert needle_crossing_coefficient(3) == pytest.approx(0.5, rel=1e-15)

    def test_needle_coefficient_dual_forms_to_width_60(self):
        # the implementation raises if its two internal routes drift apart;
        # re-derive the binomial route here as an external oracle
        for width in range(1, 61):
            value = needle_crossing_coefficient(width)
            if width % 2 == 0:
                oracle = 2.0**width / (width * math.pi * math.comb(width - 1, width // 2))
            else:
                oracle = math.comb(width - 1, (width - 1) // 2) / 2.0 ** (width - 1)
            assert value == pytest.approx(oracle, rel=1e-12)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            unit_ball_volume(-1)
        with pytest.raises(ValueError):
            ball_volume(0, 1.0)


class TestPrediction:
    def test_rectangular_bundle(self):
        pred = make_prediction(RECT, 10, 1.0)
        assert pred.hit_probability == pytest.approx(0.5, abs=1e-15)
        assert pred.mean == pytest.approx(5.0, abs=1e-14)
        assert pred.pmf[5] == pytest.approx(252 / 1024, abs=1e-14)

    def test_spherical_bundle(self):
        pred = make_prediction(SPHERE, 2, 1.0)
        assert pred.hit_probability is None and pred.pmf is None
        assert pred.mean == pytest.approx(8.0 / (3.0 * math.pi), rel=1e-14)

    def test_spherical_out_of_range(self):
        with pytest.raises(TheoryRangeError):
            make_prediction(SPHERE, 2, 2.0)
