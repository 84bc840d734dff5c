"""Exact drawing-probability mass functions and seeded sample generation.

The pmf of the number of white balls in an m-ball sample is hypergeometric
(sampling without replacement) or binomial (with replacement).  Probabilities
are exact rationals; random draws use inverse CDF over the rational
cumulative sums rounded to float once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class DrawDistribution:
    """Probability of k white balls in the sample, k = 0..m."""

    m: int
    probabilities: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.probabilities) != self.m + 1:
            raise ValueError("pmf must have m+1 entries")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability")
        if sum(self.probabilities) != 1:
            raise ValueError("probabilities must sum to exactly 1")

    def cdf_floats(self) -> np.ndarray:
        """Cumulative sums computed in rationals, rounded once."""
        acc = Fraction(0)
        out = []
        for p in self.probabilities:
            acc += p
            out.append(float(acc))
        out[-1] = 1.0
        return np.asarray(out)


def hypergeometric_pmf(white: int, total: int, m: int) -> DrawDistribution:
    """Law of the white count when m balls are taken at once."""
    if m < 1:
        raise ValueError("sample size m must be >= 1")
    if total < m:
        raise ValueError(f"total {total} < sample size {m}")
    if not 0 <= white <= total:
        raise ValueError(f"white count {white} outside [0, {total}]")
    denom = comb(total, m)
    probs = tuple(
        Fraction(comb(white, k) * comb(total - white, m - k), denom) for k in range(m + 1)
    )
    return DrawDistribution(m, probs)


def binomial_pmf(white: int, total: int, m: int) -> DrawDistribution:
    """Law of the white count when m balls are drawn one at a time, replaced."""
    if m < 1:
        raise ValueError("sample size m must be >= 1")
    if total < 1:
        raise ValueError("total must be >= 1")
    if not 0 <= white <= total:
        raise ValueError(f"white count {white} outside [0, {total}]")
    black = total - white
    denom = total**m
    probs = tuple(
        Fraction(comb(m, k) * white**k * black ** (m - k), denom) for k in range(m + 1)
    )
    return DrawDistribution(m, probs)


def moments_of_draw(dist: DrawDistribution) -> Tuple[Fraction, Fraction]:
    """(mean, second moment) of the white count in one sample, exact."""
    mean = sum((Fraction(k) * p for k, p in enumerate(dist.probabilities)), Fraction(0))
    second = sum((Fraction(k * k) * p for k, p in enumerate(dist.probabilities)), Fraction(0))
    return mean, second


def sample_draw(dist: DrawDistribution, rng: np.random.Generator) -> int:
    """One draw of the white count; deterministic given the stream state."""
    u = rng.random()
    cdf = dist.cdf_floats()
    return int(np.searchsorted(cdf, u, side="right"))


__all__ = [
    "DrawDistribution",
    "hypergeometric_pmf",
    "binomial_pmf",
    "moments_of_draw",
    "sample_draw",
]
