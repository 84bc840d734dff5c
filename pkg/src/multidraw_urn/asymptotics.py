"""Asymptotic expansions: variance leading terms per regime, the large-index
constant, and the mean expansion used for predictions.

Regime coefficients that are rational are kept exact; everything involving
Gamma ratios, zeta values or the infinite series is floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import mpmath

from .exact import second_moment_params
from .urn import AffineParams, IndexClass, SamplingModel, classify


# -- Riemann zeta on the real line (s != 1) ---------------------------------

_BERNOULLI_CACHE = [Fraction(1)]


def _bernoulli_even(k: int) -> Fraction:
    """B_{2k} (even-index Bernoulli numbers) via the binomial recurrence."""
    while len(_BERNOULLI_CACHE) <= k:
        mth = len(_BERNOULLI_CACHE)
        n = 2 * mth
        s = Fraction(0)
        for j in range(mth):
            s += Fraction(math.comb(n + 1, 2 * j)) * _BERNOULLI_CACHE[j]
        s += Fraction(n + 1) * Fraction(-1, 2)  # lone odd contribution B_1
        _BERNOULLI_CACHE.append(-s / (n + 1))
    return _BERNOULLI_CACHE[k]


def zeta_high(s, dps: int = 30) -> mpmath.mpf:
    """zeta(s) for real s != 1 by Euler-Maclaurin with Bernoulli corrections."""
    if s == 1:
        raise ValueError("zeta has a pole at s = 1")
    with mpmath.workdps(dps + 10):
        sm = mpmath.mpf(s) if not isinstance(s, mpmath.mpf) else s
        N = max(20, dps)
        acc = mpmath.fsum(mpmath.power(n, -sm) for n in range(1, N))
        acc += mpmath.power(N, 1 - sm) / (sm - 1)
        acc += mpmath.power(N, -sm) / 2
        target = mpmath.mpf(10) ** (-(dps + 5))
        rising = sm  # s (s+1) ... (s+2k-2)
        prev = mpmath.inf
        for k in range(1, 4 * dps):
            b = _bernoulli_even(k)
            term = (
                mpmath.mpf(b.numerator)
                / b.denominator
                / mpmath.factorial(2 * k)
                * rising
                * mpmath.power(N, 1 - sm - 2 * k)
            )
            acc += term
            if abs(term) < target or abs(term) > abs(prev):
                break
            prev = term
            rising *= (sm + 2 * k - 1) * (sm + 2 * k)
        return +acc


def zeta(s: float, precision: float = 1e-15) -> float:
    """zeta(s) as a float, |error| below `precision`."""
    dps = max(17, int(-math.log10(precision)) + 3)
    return float(zeta_high(s, dps=dps))


# -- expansion constants -----------------------------------------------------


@dataclass(frozen=True)
class ExpansionConstants:
    """Shorthand constants of the mean and beta expansions.

    mean ~ E1 n + E2 n^lambda + E3;  beta_n ~ B1 + B2/n;
    psi_n ~ n^{2 lambda} (1 + M/n);  Q = Gamma(T0/sigma + lambda)/Gamma(T0/sigma).
    """

    E1: float
    E2: float
    E3: float
    B1: float
    B2: float
    M: Fraction
    Q: float


def gamma_ratio(x: float, y: float) -> float:
    """Gamma(x)/Gamma(y) via log-Gamma (overflow-safe for large arguments)."""
    if x <= 0 or y <= 0:
        return float(mpmath.gamma(x) / mpmath.gamma(y))
    return math.exp(math.lgamma(x) - math.lgamma(y))


def psi_expansion_constant(params: AffineParams, model: SamplingModel, T0: int) -> Fraction:
    """The 1/n coefficient of psi_n / n^{2 lambda}, from the root data, exact."""
    smp = second_moment_params(params, model, T0)
    rs, rp = smp.root_sum, smp.root_product
    t = Fraction(T0, params.sigma)
    sum_sq = rs * rs - 2 * rp  # lambda1^2 + lambda2^2
    if model is SamplingModel.WITHOUT_REPLACEMENT:
        t2 = t - Fraction(1, params.sigma)
        return (sum_sq - rs - t * t + t - t2 * t2 + t2) / 2
    return (sum_sq - rs - 2 * t * t + 2 * t) / 2


def psi_simplified_constant(params: AffineParams, T0: int) -> Fraction:
    """Model-independent simplification: L^2 - L + L^2/m + 2 L T0/sigma."""
    lam = params.urn_index
    return lam * lam - lam + lam * lam / params.m + 2 * lam * Fraction(T0, params.sigma)


def expansion_constants(
    params: AffineParams, model: SamplingModel, T0: int, W0: int
) -> ExpansionConstants:
    lam = params.urn_index
    if lam >= 1:
        raise ValueError("mean expansion requires index ratio < 1")
    lamf = float(lam)
    am = params.a_m
    sigma = params.sigma
    t = T0 / sigma
    E1 = am / (1 - lamf)
    Q = gamma_ratio(t + lamf, t)
    E2 = (W0 - am * t / (1 - lamf)) / Q
    E3 = T0 * am / (sigma * (1 - lamf))
    B1 = 2.0 * am
    B2 = lamf * (params.a_m_minus_1 + params.a_m)
    return ExpansionConstants(
        E1=E1, E2=E2, E3=E3, B1=B1, B2=B2,
        M=psi_simplified_constant(params, T0),
        Q=Q,
    )


def mean_asymptotic(params: AffineParams, T0: int, W0: int, n: int) -> float:
    """E1 n + E2 n^lambda + E3; error O(n^{lambda - 1})."""
    c = expansion_constants(params, SamplingModel.WITH_REPLACEMENT, T0, W0)
    lamf = float(params.urn_index)
    return c.E1 * n + c.E2 * n**lamf + c.E3


# -- variance asymptotics ----------------------------------------------------


class LeadingShape:
    LINEAR = "n"
    N_LOG_N = "n log n"
    POWER = "n^(2 lambda)"
    ZERO = "0"


@dataclass(frozen=True)
class VarianceAsymptotic:
    regime: IndexClass
    leading_shape: str
    leading_coefficient: float
    exact_coefficient: Optional[Fraction] = None
    constant_C: Optional[float] = None
    truncation_bound: Optional[float] = None

    def predict(self, n: int, lam: float = 0.0) -> float:
        if self.leading_shape == LeadingShape.LINEAR:
            return self.leading_coefficient * n
        if self.leading_shape == LeadingShape.N_LOG_N:
            return self.leading_coefficient * n * math.log(n)
        if self.leading_shape == LeadingShape.POWER:
            return self.leading_coefficient * n ** (2 * lam)
        return 0.0


def small_index_slope(params: AffineParams) -> Fraction:
    """Linear variance coefficient a_m b_0 lambda^2 / (m (1-2 lambda)(1-lambda)^2)."""
    lam = params.urn_index
    return (
        Fraction(params.a_m * params.b0)
        * lam
        * lam
        / (params.m * (1 - 2 * lam) * (1 - lam) ** 2)
    )


def critical_index_coefficient(params: AffineParams) -> Fraction:
    """n log n coefficient a_m b_0 / m."""
    return Fraction(params.a_m * params.b0, params.m)


def _psi_zero(params: AffineParams, model: SamplingModel, T0: int) -> float:
    smp = second_moment_params(params, model, T0)
    rs, rp = float(smp.root_sum), float(smp.root_product)
    disc = rs * rs - 4 * rp
    if disc < 0:
        raise ValueError("complex second-moment roots; psi_0 undefined on the real line")
    r1 = (rs + math.sqrt(disc)) / 2
    r2 = (rs - math.sqrt(disc)) / 2
    t = T0 / params.sigma
    num = float(mpmath.gamma(r1) * mpmath.gamma(r2))
    if model is SamplingModel.WITHOUT_REPLACEMENT:
        den = float(mpmath.gamma(t) * mpmath.gamma(t - 1 / params.sigma))
    else:
        den = float(mpmath.gamma(t)) ** 2
    return num / den


def large_index_constant(
    params: AffineParams,
    model: SamplingModel,
    T0: int,
    W0: int,
    tolerance: float = 1e-3,
    max_terms: int = 400_000,
) -> Tuple[float, float]:
    """The model-dependent constant C with a reported truncation bound.

    Sums the compensated series term by term; the tail is bounded by fitting
    a power-law envelope to the trailing summands and integrating it.
    """
    lam = float(params.urn_index)
    if not 0.5 < lam < 1:
        raise ValueError("constant defined for index in (1/2, 1) only")
    if params.a_m == 0 or params.b0 == 0:
        raise ValueError("triangular urn: use the g_n W_n martingale instead")
    c = expansion_constants(params, model, T0, W0)
    smp = second_moment_params(params, model, T0)
    psi0 = _psi_zero(params, model, T0)
    sigma = params.sigma
    am = float(params.a_m)
    drift = float(params.drift())
    d = params.eigen_gap
    m = params.m
    without = model is SamplingModel.WITHOUT_REPLACEMENT
    psi = psi0
    e = float(W0)
    total = 0.0
    probe: list[Tuple[int, float]] = []
    j = 0
    while j < max_terms:
        j += 1
        T = float(T0 + sigma * (j - 1))
        if without:
            alpha = 1.0 + 2.0 * d * m / T + d * d * m * (m - 1) / (T * (T - 1.0))
            beta = d * d * (m / T - m * (m - 1.0) / (T * (T - 1.0))) + 2.0 * m * am * d / T + 2.0 * am
        else:
            alpha = 1.0 + 2.0 * d * m / T + d * d * m * (m - 1) / (T * T)
            beta = d * d * m / T + 2.0 * m * am * d / T + 2.0 * am
        psi *= alpha
        summand = (beta * e + am * am) / psi - c.B1 * j ** (-lam) * (c.E1 * j ** (1 - lam) + c.E2)
        total += summand
        e = (T + drift) / T * e + am
        if j >= max_terms // 2:
            probe.append((j, abs(summand)))
        if j >= 1000 and abs(summand) * j / lam < tolerance / 4:
            break
    # envelope fit |summand| ~ kappa j^{-q}; tail = kappa J^{1-q} / (q-1)
    j1, s1 = probe[0]
    j2, s2 = probe[-1]
    if s1 > 0 and s2 > 0 and j2 > j1:
        q = max(1.0 + lam / 2, math.log(s1 / s2) / math.log(j2 / j1))
    else:
        q = 1.0 + lam
    kappa = s2 * j2**q
    tail = kappa * j2 ** (1 - q) / (q - 1) if q > 1 else float("inf")
    C = (
        W0 * W0 / psi0
        + total
        + c.B1 * (c.E1 * zeta(2 * lam - 1) + c.E2 * zeta(lam))
        - c.E2 * c.E2
    )
    return C, tail


def variance_asymptotic(
    params: AffineParams,
    model: SamplingModel,
    T0: int,
    W0: int,
    tolerance: float = 1e-3,
) -> VarianceAsymptotic:
    """Regime-appropriate leading variance term."""
    cls = classify(params, T0)
    regime = cls.index_class
    if regime is IndexClass.DEGENERATE:
        return VarianceAsymptotic(regime, LeadingShape.ZERO, 0.0, Fraction(0))
    if regime is IndexClass.TRIANGULAR:
        raise ValueError("variance expansion covers nontriangular urns only")
    if regime is IndexClass.SMALL_INDEX:
        coeff = small_index_slope(params)
        return VarianceAsymptotic(regime, LeadingShape.LINEAR, float(coeff), coeff)
    if regime is IndexClass.CRITICAL_INDEX:
        coeff = critical_index_coefficient(params)
        return VarianceAsymptotic(regime, LeadingShape.N_LOG_N, float(coeff), coeff)
    C, bound = large_index_constant(params, model, T0, W0, tolerance=tolerance)
    return VarianceAsymptotic(
        regime, LeadingShape.POWER, C, None, constant_C=C, truncation_bound=bound
    )


__all__ = [
    "zeta",
    "zeta_high",
    "ExpansionConstants",
    "expansion_constants",
    "psi_expansion_constant",
    "psi_simplified_constant",
    "gamma_ratio",
    "mean_asymptotic",
    "LeadingShape",
    "VarianceAsymptotic",
    "small_index_slope",
    "critical_index_coefficient",
    "large_index_constant",
    "variance_asymptotic",
]
