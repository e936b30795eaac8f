"""Exact evaluation, breakpoint extraction, and the numeric slope oracle."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from kinkscope import (
    DomainRadius,
    GridResolutionError,
    KinkReport,
    NetworkParams,
    Gaussian,
    Rectangular,
    RngStream,
    Spherical,
    eval_network,
    kink_positions,
    sample_params,
    slope_change_oracle,
)
from conftest import full_kink_witness

UNBOUNDED = DomainRadius.unbounded()


def relu_identity():
    return NetworkParams(1, [1.0], [0.0], [1.0], 0.0)


# zero or a comfortably-normal magnitude: scaling by 2^+-20 stays exact
_magnitude = st.floats(min_value=1e-280, max_value=1e6)
finite_float = st.one_of(st.just(0.0), _magnitude, _magnitude.map(lambda v: -v))


@st.composite
def network_params(draw, max_width=8):
    width = draw(st.integers(min_value=1, max_value=max_width))
    vec = st.lists(finite_float, min_size=width, max_size=width)
    return NetworkParams(
        width=width,
        first_weights=draw(vec),
        first_biases=draw(vec),
        out_weights=draw(vec),
        out_bias=draw(finite_float),
    )


class TestEvalNetwork:
    def test_relu_positive_side(self):
        assert eval_network(relu_identity(), 2.0) == 2.0

    def test_relu_negative_side(self):
        assert eval_network(relu_identity(), -1.0) == 0.0

    def test_direct_substitution(self):
        params = NetworkParams(2, [2.0, 1.0], [1.0, -2.0], [1.0, 1.0], 3.0)
        assert eval_network(params, 0.0) == 4.0

    def test_vectorized_matches_scalar(self, rng):
        params = sample_params(Gaussian(1.0), 6, RngStream(5))
        xs = rng.uniform(-3.0, 3.0, 50)
        batch = eval_network(params, xs)
        assert batch.tolist() == [eval_network(params, float(x)) for x in xs]

    @given(params=network_params(), x=finite_float, y=finite_float)
    @settings(max_examples=200, deadline=None)
    def test_lipschitz_continuity(self, params, x, y):
        bound = float(np.abs(params.out_weights * params.first_weights).sum())
        gap = abs(eval_network(params, x) - eval_network(params, y))
        # rounding slack scales with the magnitude of the summed terms
        magnitude = abs(params.out_bias) + float(
            (
                np.abs(params.out_weights)
                * (np.abs(params.first_biases) + max(abs(x), abs(y)) * np.abs(params.first_weights))
            ).sum()
        )
        slack = 64.0 * np.finfo(np.float64).eps * magnitude + 1e-12
        assert gap <= bound * abs(x - y) * (1.0 + 1e-9) + slack


class TestKinkPositions:
    def test_two_kinks_unbounded(self):
        params = NetworkParams(2, [2.0, 1.0], [1.0, -2.0], [1.0, 1.0], 0.0)
        report = kink_positions(params, UNBOUNDED)
        assert report.positions.tolist() == [-0.5, 2.0]
        assert report.count == 2

    def test_domain_excludes_outside_kink(self):
        params = NetworkParams(2, [2.0, 1.0], [1.0, -2.0], [1.0, 1.0], 0.0)
        report = kink_positions(params, DomainRadius.finite(1.0))
        assert report.positions.tolist() == [-0.5]
        assert report.count == 1

    def test_zero_weight_contributes_nothing(self):
        params = NetworkParams(2, [0.0, 5.0], [1.0, 0.0], [1.0, 1.0], 0.0)
        report = kink_positions(params, UNBOUNDED)
        assert report.count == 1
        assert report.positions[0] == 0.0

    def test_boundary_kink_excluded(self):
        params = NetworkParams(1, [1.0], [-1.0], [1.0], 0.0)  # kink at exactly 1.0
        assert kink_positions(params, DomainRadius.finite(1.0)).count == 0
        assert kink_positions(params, DomainRadius.finite(1.0 + 1e-9)).count == 1

    def test_coincident_candidates_merge(self):
        params = NetworkParams(2, [1.0, 2.0], [-0.5, -1.0], [1.0, 1.0], 0.0)
        report = kink_positions(params, UNBOUNDED)
        assert report.count == 1
        assert report.positions.tolist() == [0.5]

    @given(params=network_params())
    @settings(max_examples=300, deadline=None)
    def test_count_at_most_width(self, params):
        for domain in (UNBOUNDED, DomainRadius.finite(2.0)):
            assert kink_positions(params, domain).count <= params.width

    @pytest.mark.parametrize("width", [1, 2, 5, 17, 50])
    def test_full_width_witness(self, width):
        params = full_kink_witness(width)
        report = kink_positions(params, DomainRadius.finite(1.0))
        assert report.count == width

    @given(
        params=network_params(),
        exponent=st.integers(min_value=-20, max_value=20),
    )
    @settings(max_examples=150, deadline=None)
    def test_scale_invariance_power_of_two_bit_exact(self, params, exponent):
        c = 2.0**exponent
        scaled = NetworkParams(
            params.width,
            c * params.first_weights,
            c * params.first_biases,
            params.out_weights,
            params.out_bias,
        )
        for domain in (UNBOUNDED, DomainRadius.finite(1.5)):
            a = kink_positions(params, domain)
            b = kink_positions(scaled, domain)
            assert np.array_equal(a.positions, b.positions)

    def test_scale_invariance_general_factor(self, rng):
        # arbitrary positive factors can move a ratio by an ulp; away from
        # the domain boundary and from coincidences the output is stable
        for _ in range(200):
            width = int(rng.integers(1, 8))
            params = sample_params(Rectangular(1.0), width, RngStream(int(rng.integers(2**31))))
            c = float(rng.uniform(1e-3, 1e3))
            scaled = NetworkParams(
                width,
                c * params.first_weights,
                c * params.first_biases,
                params.out_weights,
                params.out_bias,
            )
            a = kink_positions(params, UNBOUNDED)
            b = kink_positions(scaled, UNBOUNDED)
            assert a.count == b.count
            assert np.allclose(a.positions, b.positions, rtol=1e-12, atol=1e-300)

    @given(params=network_params())
    @settings(max_examples=150, deadline=None)
    def test_reflection_negates_positions(self, params):
        # merged near-coincident clusters keep their leftmost member, which
        # reflection maps to the rightmost; restrict to merge-free draws
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = -params.first_biases / params.first_weights
        raw = np.sort(raw[np.isfinite(raw)])
        assume(raw.size < 2 or np.min(np.diff(raw)) > 1e-12)
        reflected = NetworkParams(
            params.width,
            -params.first_weights,
            params.first_biases,
            params.out_weights,
            params.out_bias,
        )
        a = kink_positions(params, UNBOUNDED)
        b = kink_positions(reflected, UNBOUNDED)
        assert np.array_equal(b.positions, -a.positions[::-1])


class TestSlopeChangeOracle:
    def test_single_relu_kink(self):
        assert slope_change_oracle(relu_identity(), DomainRadius.finite(2.0), 1001) == 1

    def test_affine_network_has_no_kinks(self):
        params = NetworkParams(3, [0.0, 0.0, 0.0], [1.0, -2.0, 0.5], [1.0, 2.0, 3.0], 4.0)
        assert slope_change_oracle(params, DomainRadius.finite(1.0), 101) == 0

    def test_resolution_error_for_close_kinks(self):
        params = NetworkParams(2, [1.0, 1.0], [0.0, -1e-4], [1.0, 1.0], 0.0)
        with pytest.raises(GridResolutionError):
            slope_change_oracle(params, DomainRadius.finite(1.0), 101)
        # a fine enough grid resolves the pair
        assert slope_change_oracle(params, DomainRadius.finite(1.0), 200001) == 2

    def test_input_validation(self):
        with pytest.raises(ValueError):
            slope_change_oracle(relu_identity(), UNBOUNDED, 101)
        with pytest.raises(ValueError):
            slope_change_oracle(relu_identity(), DomainRadius.finite(1.0), 2)

    @pytest.mark.parametrize(
        "dist", [Rectangular(1.0), Gaussian(1.0), Spherical(1.0)], ids=lambda d: type(d).__name__
    )
    def test_agrees_with_analytic_on_random_draws(self, dist):
        # cross-validation of the analytic extractor (which ignores the
        # output layer) against pure numerics, skipping draws whose kinks sit
        # within 10 grid points (in x units) of each other or of the boundary
        domain = DomainRadius.finite(1.0)
        grid_points = 2001
        exclusion = 10.0 / grid_points
        checked = 0
        for seed in range(250):
            params = sample_params(dist, 6, RngStream(seed, stream_id=9))
            report = kink_positions(params, domain)
            if report.count and np.min(1.0 - np.abs(report.positions)) < exclusion:
                continue
            if report.count > 1 and np.min(np.diff(report.positions)) < exclusion:
                continue
            assert slope_change_oracle(params, domain, grid_points) == report.count
            checked += 1
        assert checked > 200  # exclusions must stay rare


class TestDomainRadius:
    def test_finite_and_unbounded(self):
        dom = DomainRadius.finite(2.0)
        assert dom.is_finite and dom.contains(1.99) and not dom.contains(2.0)
        unb = DomainRadius.unbounded()
        assert not unb.is_finite and unb.contains(1e300)

    def test_validation(self):
        for bad in (0.0, -1.0, math.nan):
            with pytest.raises(ValueError):
                DomainRadius(bad)
        with pytest.raises(ValueError):
            DomainRadius.finite(math.inf)


class TestValueTypes:
    def test_network_params_validation(self):
        with pytest.raises(ValueError):
            NetworkParams(2, [1.0], [0.0, 0.0], [1.0, 1.0], 0.0)
        with pytest.raises(ValueError):
            NetworkParams(1, [math.nan], [0.0], [1.0], 0.0)
        with pytest.raises(ValueError):
            NetworkParams(0, [], [], [], 0.0)
        with pytest.raises(ValueError):
            NetworkParams(1, [1.0], [0.0], [1.0], math.inf)

    def test_network_params_immutable_and_comparable(self):
        params = relu_identity()
        with pytest.raises(ValueError):
            params.first_weights[0] = 2.0
        assert params == relu_identity()
        assert params != NetworkParams(1, [1.0], [0.5], [1.0], 0.0)

    def test_kink_report_validation(self):
        with pytest.raises(ValueError):
            KinkReport(positions=np.array([0.0, 1.0]), count=1)
        with pytest.raises(ValueError):
            KinkReport(positions=np.array([1.0, 0.0]), count=2)
        report = KinkReport(positions=np.array([0.0, 1.0]), count=2)
        assert report.count == 2
