"""Balanced two-colour urn schemes with multiple drawings.

Exact rational moments, regime classification by the urn index, seeded
Monte Carlo under both sampling models, and statistical verification of
the limit theorems against an independent distributional oracle.
"""

from .urn import (
    AffineParams,
    Classification,
    IndexClass,
    NotAffine,
    ReplacementMatrix,
    SamplingModel,
    TenabilityReport,
    UrnState,
    check_affinity,
    classify,
    conditional_coefficients,
    conditional_mean_coefficients,
    urn_index,
    validate_tenability,
)
from .kernels import (
    DrawDistribution,
    binomial_pmf,
    hypergeometric_pmf,
    moments_of_draw,
    sample_draw,
)
from .exact import (
    ExactMomentSeries,
    RestartRequiredError,
    SecondMomentParams,
    expected_value_closed_form,
    expected_value_exact,
    g_sequence,
    moment_series,
    moment_series_float,
    second_moment_exact,
    second_moment_params,
    variance_exact,
)
from .oracle import StateDistribution, conditional_mean_check, evolve, oracle_moments
from .asymptotics import (
    ExpansionConstants,
    VarianceAsymptotic,
    critical_index_coefficient,
    expansion_constants,
    large_index_constant,
    mean_asymptotic,
    small_index_slope,
    variance_asymptotic,
    zeta,
)
from .simulate import (
    SimulationConfig,
    SimulationTrace,
    dyadic_checkpoints,
    martingale_transform,
    run,
    simulate_batch,
    simulate_checkpoints,
)
from .verify import (
    TestResult,
    UnsupportedRegimeError,
    VerificationReport,
    check_l2_convergence,
    check_ratio_convergence,
    ks_statistic,
    ratio_limit,
    run_battery,
    verify_clt,
)

__version__ = "0.1.0"
