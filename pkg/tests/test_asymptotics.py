import math
from fractions import Fraction

import mpmath
import pytest

from multidraw_urn import (
    AffineParams,
    SamplingModel,
    critical_index_coefficient,
    expansion_constants,
    large_index_constant,
    mean_asymptotic,
    moment_series_float,
    small_index_slope,
    variance_asymptotic,
    zeta,
)
from multidraw_urn.asymptotics import (
    gamma_ratio,
    psi_expansion_constant,
    psi_simplified_constant,
    zeta_high,
)
from multidraw_urn.urn import IndexClass

FRIEDMAN = AffineParams(2, 1, 2, 2)
CRITICAL = AffineParams(2, 2, 1, 4)
LARGE = AffineParams(3, 3, 1, 8)


def test_zeta_classical_values():
    assert math.isclose(zeta(0), -0.5, abs_tol=1e-14)
    assert math.isclose(zeta(-1), -1.0 / 12.0, abs_tol=1e-14)
    assert math.isclose(zeta(2), math.pi**2 / 6, rel_tol=1e-14)


@pytest.mark.parametrize("s", [0.75, 0.5, 0.25, -0.5, -2.5, 1.5, 4.0])
def test_zeta_against_independent_evaluation(s):
    # mpmath uses a different algorithm, so this is a genuine cross-check
    assert abs(zeta(s) - float(mpmath.zeta(s))) < 1e-13


def test_zeta_high_precision_self_consistent():
    a = zeta_high(0.75, dps=30)
    b = zeta_high(0.75, dps=60)
    assert abs(a - b) < mpmath.mpf(10) ** -28


def test_zeta_pole():
    with pytest.raises(ValueError):
        zeta(1)


def test_gamma_ratio_overflow_safe():
    # both Gammas overflow a float on their own
    r = gamma_ratio(200.25, 200.0)
    assert math.isclose(r, math.exp(0.25 * math.log(199.5)), rel_tol=1e-3)


def test_expansion_constants_identities():
    c = expansion_constants(LARGE, SamplingModel.WITH_REPLACEMENT, 8, 4)
    lam = 0.75
    assert c.E1 == 1 / (1 - lam) == 4.0
    assert c.B1 == 2.0
    assert c.B2 == lam * (3 + 1)
    # for this start W0 equals a_m t/(1-lam), so the n^lam term vanishes
    assert c.E2 == 0.0
    assert c.M == Fraction(3, 2)


@pytest.mark.parametrize("params,T0", [(LARGE, 8), (FRIEDMAN, 4), (CRITICAL, 4),
                                       (AffineParams(1, 3, 1, 5), 7)])
def test_psi_constant_model_independent(params, T0):
    # the root-based expansion constant must agree with the simplified
    # closed form exactly, for both models
    simplified = psi_simplified_constant(params, T0)
    for model in SamplingModel:
        assert psi_expansion_constant(params, model, T0) == simplified


def test_small_index_slope_friedman():
    assert small_index_slope(FRIEDMAN) == Fraction(1, 6)


def test_small_index_slope_color_swap_invariant():
    # V[B_n] = V[W_n], so the slope computed from the swapped urn matches
    mx = FRIEDMAN.matrix().swap_colors()
    from multidraw_urn import check_affinity

    swapped = check_affinity(mx)
    assert small_index_slope(swapped) == small_index_slope(FRIEDMAN)


def test_critical_coefficient():
    assert critical_index_coefficient(CRITICAL) == Fraction(1, 2)


def test_variance_asymptotic_routing():
    deg = AffineParams(2, 1, 1, 2)
    va = variance_asymptotic(deg, SamplingModel.WITHOUT_REPLACEMENT, 4, 2)
    assert va.leading_coefficient == 0.0
    va = variance_asymptotic(FRIEDMAN, SamplingModel.WITHOUT_REPLACEMENT, 4, 2)
    assert va.regime is IndexClass.SMALL_INDEX
    assert va.exact_coefficient == Fraction(1, 6)
    tri = AffineParams(2, 1, 0, 2)
    with pytest.raises(ValueError):
        variance_asymptotic(tri, SamplingModel.WITHOUT_REPLACEMENT, 4, 2)


def test_large_index_constant_model_dependent():
    CM, bM = large_index_constant(LARGE, SamplingModel.WITHOUT_REPLACEMENT, 8, 4)
    CR, bR = large_index_constant(LARGE, SamplingModel.WITH_REPLACEMENT, 8, 4)
    assert CM > 0 and CR > 0
    assert abs(CM - CR) > 10 * (bM + bR)  # genuinely different constants


def test_large_index_constant_tolerance_consistency():
    C1, bound1 = large_index_constant(LARGE, SamplingModel.WITH_REPLACEMENT, 8, 4,
                                      tolerance=2e-3)
    C2, bound2 = large_index_constant(LARGE, SamplingModel.WITH_REPLACEMENT, 8, 4,
                                      tolerance=1e-3)
    assert abs(C1 - C2) <= bound1 + bound2


def test_large_index_constant_regime_guards():
    with pytest.raises(ValueError):
        large_index_constant(FRIEDMAN, SamplingModel.WITHOUT_REPLACEMENT, 4, 2)
    tri = AffineParams(2, 4, 0, 6)  # index 4/3 but a_m = 0
    with pytest.raises(ValueError):
        large_index_constant(tri, SamplingModel.WITHOUT_REPLACEMENT, 6, 3)


def test_mean_asymptotic_error_order():
    # |prediction - exact| should be O(n^{lam-1}); check the ratio stays
    # bounded.  Start chosen so the n^lam term is genuinely present.
    params, T0, W0 = CRITICAL, 6, 1
    lam = 0.5
    t = T0 / params.sigma
    E1 = params.a_m / (1 - lam)

    def closed(n):
        ratio = mpmath.gamma(n + t + lam) * mpmath.gamma(t) / (
            mpmath.gamma(n + t) * mpmath.gamma(t + lam)
        )
        return float(E1 * (n + t) + (W0 - E1 * t) * ratio)

    # sanity: the float closed form agrees with the exact recurrence
    mean, _, _, _ = moment_series_float(params, SamplingModel.WITH_REPLACEMENT, T0, W0, 1000)
    assert math.isclose(closed(1000), mean[1000], rel_tol=1e-10)
    ratios = []
    for n in (10**3, 10**4, 10**5):
        err = abs(mean_asymptotic(params, T0, W0, n) - closed(n))
        assert err > 0
        ratios.append(err / n ** (lam - 1))
    assert max(ratios) < 10 * min(ratios)


def test_mean_asymptotic_rejects_index_one():
    polya_like = AffineParams(2, 1, 0, 2)
    with pytest.raises(ValueError):
        mean_asymptotic(polya_like, 4, 2, 100)
