"""Pathwise local time, crossings and occupation measures of the classical risk process."""

__version__ = "0.1.0"

from .analytics import (
    AdaptiveSeries,
    AnalyticValue,
    ExpectedLocalTime,
    FixedSeries,
    NumericConfig,
    FIVE_TERM_CONFIG,
    ProductIndicator,
    compound_cdf,
    compound_density,
    expected_local_time,
    increment_probability,
    integrate_against_expected_local_time,
    regularized_lower_gamma,
    singular_local_time,
    theorem2_functional,
)
from .errors import (
    ConvergenceError,
    DomainError,
    IntegrityError,
    PreconditionError,
    RiskLTError,
    UnsupportedModelError,
)
from .localtime import (
    MollifiedStep,
    approx_local_time,
    approx_local_time_direct,
    crossing_count,
    crossing_count_geometric,
    endpoint_levels,
    exactness_threshold,
    local_time_at,
    local_time_levels,
    local_time_tanaka,
    scaled_local_time,
    tanaka_jump_sum,
    tanaka_kernel,
)
from .montecarlo import (
    Estimate,
    mc_expected_local_time,
    mc_expected_local_time_grid,
    mc_occupation_identity,
    mc_theorem2_lhs,
    two_time_occupation,
)
from .occupation import (
    LocalTimeProfile,
    StepFunction,
    integrate_product,
    local_time_profile,
    occupation_integral,
    occupation_measure,
    random_step_function,
    time_integral,
)
from .process import (
    ClaimModel,
    ExponentialClaims,
    ModelParams,
    SamplePath,
    Segment,
    evaluate,
    evaluate_left,
    path_seed,
    segments,
    simulate,
)
from .quadrature import adaptive_quadrature
