"""Independent ground truth: exact evolution of the full law of W_n.

This module deliberately imports only the sampling pmfs, never the moment
recurrences, so its output can serve as an oracle for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .kernels import binomial_pmf, hypergeometric_pmf
from .urn import ReplacementMatrix, SamplingModel


@dataclass
class StateDistribution:
    """Exact probability mass over white-ball counts after `step` draws."""

    step: int
    total: int
    mass: Dict[int, Fraction]

    def __post_init__(self) -> None:
        if sum(self.mass.values()) != 1:
            raise ValueError("state masses must sum to exactly 1")
        for w in self.mass:
            if not 0 <= w <= self.total:
                raise ValueError(f"white count {w} outside [0, {self.total}]")

    def support(self) -> Tuple[int, int]:
        return min(self.mass), max(self.mass)

    def dump_csv(self, path: str) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["w", "p", "p_decimal"])
            for white in sorted(self.mass):
                p = self.mass[white]
                w.writerow([white, f"{p.numerator}/{p.denominator}", format(float(p), ".17g")])


def _pmf(model: SamplingModel, white: int, total: int, m: int):
    if model is SamplingModel.WITHOUT_REPLACEMENT:
        return hypergeometric_pmf(white, total, m)
    return binomial_pmf(white, total, m)


def evolve(
    matrix: ReplacementMatrix, model: SamplingModel, W0: int, B0: int, n: int
) -> StateDistribution:
    """Push the point mass at W_0 forward n steps, exactly."""
    return evolve_series(matrix, model, W0, B0, n)[-1]


def evolve_series(
    matrix: ReplacementMatrix, model: SamplingModel, W0: int, B0: int, n: int
) -> "List[StateDistribution]":
    """Distributions after 0..n steps, in one forward pass."""
    m = matrix.m
    if W0 < 0 or B0 < 0 or W0 + B0 < m:
        raise ValueError("need W0, B0 >= 0 and W0 + B0 >= m")
    total = W0 + B0
    mass: Dict[int, Fraction] = {W0: Fraction(1)}
    out = [StateDistribution(step=0, total=total, mass=dict(mass))]
    for step in range(n):
        new_total = total + matrix.sigma
        new_mass: Dict[int, Fraction] = {}
        for w, p in mass.items():
            dist = _pmf(model, w, total, m)
            for k, pk in enumerate(dist.probabilities):
                if pk == 0:
                    continue
                w_next = w + matrix.a[m - k]
                if not 0 <= w_next <= new_total:
                    raise AssertionError(
                        f"tenability violation at step {step + 1}: "
                        f"w={w}, k={k} -> {w_next} outside [0, {new_total}]"
                    )
                new_mass[w_next] = new_mass.get(w_next, Fraction(0)) + p * pk
        mass = new_mass
        total = new_total
        out.append(StateDistribution(step=step + 1, total=total, mass=dict(mass)))
    return out


def oracle_moments(dist: StateDistribution) -> Tuple[Fraction, Fraction]:
    """(mean, second moment) of the distribution, exact."""
    mean = sum((Fraction(w) * p for w, p in dist.mass.items()), Fraction(0))
    second = sum((Fraction(w * w) * p for w, p in dist.mass.items()), Fraction(0))
    return mean, second


def conditional_mean_check(
    matrix: ReplacementMatrix, model: SamplingModel, dist: StateDistribution
) -> Tuple[bool, Optional[int]]:
    """Verify E[W_n | W_{n-1}=w] = alpha_n w + a_m at every reachable state.

    Equivalent to the one-step martingale identity for the compensated
    process.  Returns (ok, counterexample state or None).
    """
    m = matrix.m
    a_m = matrix.a[m]
    drift = m * (matrix.a[m - 1] - matrix.a[m])
    T_prev = dist.total
    alpha = Fraction(T_prev + drift, T_prev)
    for w in dist.mass:
        pmf = _pmf(model, w, T_prev, m)
        cond_mean = sum(
            (pk * (w + matrix.a[m - k]) for k, pk in enumerate(pmf.probabilities)),
            Fraction(0),
        )
        if cond_mean != alpha * w + a_m:
            return False, w
    return True, None


__all__ = ["StateDistribution", "evolve", "evolve_series", "oracle_moments", "conditional_mean_check"]
