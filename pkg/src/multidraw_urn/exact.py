"""Exact rational moment computation for balanced affine urns.

Primary path is the linear recurrences for E[W_n] and E[W_n^2]; the closed
form for the mean is a cross-check.  All values are `fractions.Fraction`.
A float64 twin of the recurrences (`moment_series_float`) covers long
horizons (n ~ 10^5..10^6) where exact rationals are infeasible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .urn import AffineParams, SamplingModel


class RestartRequiredError(ValueError):
    """The standing positivity assumption T_0 + m(a_{m-1}-a_m) > 0 fails."""


def _require_assumption(params: AffineParams, T0: int) -> None:
    if T0 + params.drift() <= 0:
        raise RestartRequiredError(
            f"T0 + m(a_m_minus_1 - a_m) = {T0 + params.drift()} <= 0; "
            "restart the urn with a later step as time zero (larger T0)"
        )


def g_sequence(params: AffineParams, T0: int, n_max: int) -> List[Fraction]:
    """g_n = prod_{j<n} T_j / (T_j + m(a_{m-1}-a_m)), with g_0 = 1."""
    _require_assumption(params, T0)
    drift = params.drift()
    g = [Fraction(1)]
    for j in range(n_max):
        Tj = T0 + params.sigma * j
        g.append(g[-1] * Fraction(Tj, Tj + drift))
    return g


def expected_value_exact(params: AffineParams, T0: int, W0: int, n_max: int) -> List[Fraction]:
    """E[W_n] for n = 0..n_max by the affine mean recurrence.

    Valid even when the g_n positivity assumption fails: the recurrence only
    divides by the (positive, growing) totals.
    """
    if W0 < 0 or W0 > T0:
        raise ValueError("W0 must satisfy 0 <= W0 <= T0")
    if T0 < params.m:
        raise ValueError("initial total must allow the first draw (T0 >= m)")
    drift = params.drift()
    am = params.a_m
    out = [Fraction(W0)]
    for n in range(1, n_max + 1):
        T_prev = T0 + params.sigma * (n - 1)
        out.append(Fraction(T_prev + drift, T_prev) * out[-1] + am)
    return out


def _binomial_ratio(x: Fraction, y: Fraction, n: int) -> Fraction:
    """C(n-1+x, n) / C(n-1+y, n) as a finite product of rationals."""
    out = Fraction(1)
    for i in range(n):
        out *= (x + i) / (y + i)
    return out


def expected_value_closed_form(params: AffineParams, T0: int, W0: int, n: int) -> Fraction:
    """Closed-form E[W_n]; must agree exactly with the recurrence."""
    lam = params.urn_index
    sigma = params.sigma
    am = params.a_m
    if lam == 1:
        # tenability forces a_m = b_0 = 0 here
        if am != 0:
            raise ValueError("index ratio 1 requires a_m = 0")
        return Fraction(W0) * Fraction(n * sigma + T0, T0)
    if lam > 1:
        raise ValueError("closed form unsupported for index ratio > 1; use the recurrence")
    t = Fraction(T0, sigma)
    linear = am * (n + t) / (1 - lam)
    ratio = _binomial_ratio(t + lam, t, n)
    return linear + (W0 - am * t / (1 - lam)) * ratio


@dataclass(frozen=True)
class SecondMomentParams:
    """Coefficients of E[W_n^2] = alpha_n E[W_{n-1}^2] + beta_n E[W_{n-1}] + gamma.

    Root data describe the factorization of alpha_n: the quadratic
    x^2 + root_sum x + root_product over the model-dependent denominator.
    """

    params: AffineParams
    model: SamplingModel
    T0: int
    root_sum: Fraction
    root_product: Fraction
    gamma: Fraction

    def alpha(self, n: int) -> Fraction:
        T = self.T0 + self.params.sigma * (n - 1)
        d = self.params.eigen_gap
        m = self.params.m
        out = Fraction(1) + Fraction(2 * d * m, T)
        if m >= 2:
            if self.model is SamplingModel.WITHOUT_REPLACEMENT:
                out += Fraction(d * d * m * (m - 1), T * (T - 1))
            else:
                out += Fraction(d * d * m * (m - 1), T * T)
        return out

    def alpha_from_roots(self, n: int) -> Fraction:
        """alpha_n through the root factorization; exact since the
        symmetric functions of the roots are rational."""
        sigma = self.params.sigma
        x = Fraction(n - 1)
        num = x * x + self.root_sum * x + self.root_product
        t = Fraction(self.T0, sigma)
        if self.model is SamplingModel.WITHOUT_REPLACEMENT:
            den = (x + t) * (x + t - Fraction(1, sigma))
        else:
            den = (x + t) ** 2
        return num / den

    def beta(self, n: int) -> Fraction:
        T = self.T0 + self.params.sigma * (n - 1)
        d = self.params.eigen_gap
        m = self.params.m
        am = self.params.a_m
        out = Fraction(2 * m * am * d, T) + 2 * am
        if self.model is SamplingModel.WITHOUT_REPLACEMENT:
            hyper = Fraction(m, T)
            if m >= 2:
                hyper -= Fraction(m * (m - 1), T * (T - 1))
            out += d * d * hyper
        else:
            out += Fraction(d * d * m, T)
        return out


def second_moment_params(params: AffineParams, model: SamplingModel, T0: int) -> SecondMomentParams:
    d = params.eigen_gap
    m = params.m
    sigma = params.sigma
    A = m * d + T0
    if model is SamplingModel.WITHOUT_REPLACEMENT:
        root_sum = Fraction(2 * A - 1, sigma)
        root_product = Fraction(A * A - A - m * d * (d + 1), sigma * sigma)
    else:
        root_sum = Fraction(2 * A, sigma)
        root_product = Fraction(A * A - d * d * m, sigma * sigma)
    return SecondMomentParams(
        params=params,
        model=model,
        T0=T0,
        root_sum=root_sum,
        root_product=root_product,
        gamma=Fraction(params.a_m**2),
    )


def second_moment_exact(
    params: AffineParams, model: SamplingModel, T0: int, W0: int, n_max: int
) -> List[Fraction]:
    """E[W_n^2] for n = 0..n_max via the model-dependent recurrence."""
    mean = expected_value_exact(params, T0, W0, n_max)
    smp = second_moment_params(params, model, T0)
    out = [Fraction(W0 * W0)]
    for n in range(1, n_max + 1):
        out.append(smp.alpha(n) * out[-1] + smp.beta(n) * mean[n - 1] + smp.gamma)
    return out


def variance_exact(mean: Sequence[Fraction], second: Sequence[Fraction]) -> List[Fraction]:
    out = []
    for n, (e, s) in enumerate(zip(mean, second)):
        v = s - e * e
        if v < 0:
            raise AssertionError(f"negative variance {v} at n={n}: recurrence inconsistency")
        out.append(v)
    return out


@dataclass
class ExactMomentSeries:
    """Rational E[W_n], E[W_n^2], V[W_n] and g_n for n = 0..n_max."""

    n_max: int
    model: SamplingModel
    mean: List[Fraction]
    second: List[Fraction]
    variance: List[Fraction]
    g: Optional[List[Fraction]]  # absent when T0 + m(a_{m-1}-a_m) <= 0

    def to_csv(self, path: str, extra_columns: Optional[dict] = None) -> None:
        """CSV with exact p/q strings plus 17-digit decimal approximations."""
        header = [
            "n",
            "mean", "mean_decimal",
            "second", "second_decimal",
            "variance", "variance_decimal",
        ]
        if self.g is not None:
            header += ["g", "g_decimal"]
        extras = extra_columns or {}
        header += list(extras)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for n in range(self.n_max + 1):
                row = [n]
                cols = [self.mean[n], self.second[n], self.variance[n]]
                if self.g is not None:
                    cols.append(self.g[n])
                for col in cols:
                    row += [f"{col.numerator}/{col.denominator}", format(float(col), ".17g")]
                row += [format(extras[name][n], ".17g") for name in extras]
                w.writerow(row)


def moment_series(
    params: AffineParams, model: SamplingModel, T0: int, W0: int, n_max: int
) -> ExactMomentSeries:
    mean = expected_value_exact(params, T0, W0, n_max)
    second = second_moment_exact(params, model, T0, W0, n_max)
    g = g_sequence(params, T0, n_max) if T0 + params.drift() > 0 else None
    return ExactMomentSeries(
        n_max=n_max,
        model=model,
        mean=mean,
        second=second,
        variance=variance_exact(mean, second),
        g=g,
    )


def moment_series_float(
    params: AffineParams, model: SamplingModel, T0: int, W0: int, n_max: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(mean, second, variance, g) as float64 arrays for n = 0..n_max.

    Same recurrences as the exact path; cancellation in V = S - E^2 loses
    roughly the ratio E^2/V in relative precision, which stays far below
    the percent-level tolerances used at long horizons.  When the g_n
    positivity assumption fails, the g column holds NaN.
    """
    if T0 < params.m:
        raise ValueError("initial total must allow the first draw (T0 >= m)")
    d = params.eigen_gap
    m = params.m
    am = float(params.a_m)
    sigma = params.sigma
    drift = float(params.drift())
    without = model is SamplingModel.WITHOUT_REPLACEMENT
    mean = np.empty(n_max + 1)
    second = np.empty(n_max + 1)
    g = np.empty(n_max + 1)
    mean[0] = W0
    second[0] = W0 * W0
    g[0] = 1.0
    g_ok = T0 + params.drift() > 0
    if not g_ok:
        g[:] = np.nan
    e = float(W0)
    s = float(W0 * W0)
    gg = 1.0
    dm2 = float(d * d * m * (m - 1))
    dd = float(d * d)
    for n in range(1, n_max + 1):
        T = float(T0 + sigma * (n - 1))
        alpha = 1.0 + 2.0 * d * m / T
        beta = 2.0 * m * am * d / T + 2.0 * am
        if without:
            if m >= 2:
                alpha += dm2 / (T * (T - 1.0))
            beta += dd * (m / T - (m * (m - 1.0)) / (T * (T - 1.0)))
        else:
            if m >= 2:
                alpha += dm2 / (T * T)
            beta += dd * m / T
        s = alpha * s + beta * e + am * am
        e = (T + drift) / T * e + am
        mean[n] = e
        second[n] = s
        if g_ok:
            gg *= T / (T + drift)
            g[n] = gg
    variance = second - mean * mean
    return mean, second, variance, g


__all__ = [
    "RestartRequiredError",
    "g_sequence",
    "expected_value_exact",
    "expected_value_closed_form",
    "SecondMomentParams",
    "second_moment_params",
    "second_moment_exact",
    "variance_exact",
    "ExactMomentSeries",
    "moment_series",
    "moment_series_float",
]
