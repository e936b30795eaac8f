"""Kink statistics of random one-hidden-layer ReLU networks.

Exact breakpoint extraction for piecewise-linear network functions, seeded
sampling under rectangular / Gaussian / spherical parameter models,
closed-form laws for kink counts and positions, and a deterministic Monte
Carlo engine plus statistical tests to verify those laws empirically.
"""

from ._kernels import backend as kernel_backend
from .engine import (
    BATCH_ROWS,
    ComparisonReport,
    ConfigMismatchError,
    DEFAULT_RADII_CAP,
    ExperimentConfig,
    MonteCarloSummary,
    compare_to_theory,
    empty_summary,
    merge_summaries,
    run_experiment,
    summary_from_json_dict,
    summary_to_json_dict,
)
from .network import (
    KINK_MERGE_TOL,
    SLOPE_CHANGE_REL_TOL,
    DomainRadius,
    GridResolutionError,
    KinkReport,
    NetworkParams,
    eval_network,
    kink_positions,
    slope_change_oracle,
)
from .sampling import (
    Gaussian,
    ParamDistribution,
    Rectangular,
    RngStream,
    Spherical,
    derive_generator_seed,
    distribution_from_kind,
    sample_in_ball,
    sample_params,
    unit_first_layer_draws,
)
from .stats import (
    GofReport,
    MeanCI,
    chi_square_critical,
    chi_square_statistic,
    kolmogorov_critical,
    ks_statistic,
    mean_ci,
)
from .theory import (
    Prediction,
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

__version__ = "0.1.0"
