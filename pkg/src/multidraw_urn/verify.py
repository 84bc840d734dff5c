"""Statistical checks connecting Monte Carlo output to the limit theorems.

Every check returns a TestResult carrying the statistic, the threshold it
was compared against, and the seed, so a report can be regenerated
bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import variance_asymptotic
from .exact import moment_series_float
from .simulate import SimulationConfig, dyadic_checkpoints, simulate_checkpoints
from .urn import AffineParams, IndexClass, SamplingModel, check_affinity, classify, NotAffine

KS_CRITICAL_1PCT = 1.628
KS_CRITICAL_5PCT = 1.358


class UnsupportedRegimeError(ValueError):
    """The requested check does not apply to this urn's regime."""


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def ks_statistic(sample: Sequence[float]) -> float:
    """Sup-distance between the empirical CDF and the standard normal CDF."""
    xs = np.sort(np.asarray(sample, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    cdf = np.asarray([normal_cdf(x) for x in xs])
    grid = np.arange(n, dtype=float)
    return float(max((cdf - grid / n).max(), ((grid + 1) / n - cdf).max()))


@dataclass
class TestResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    seed: Optional[int] = None
    details: Dict[str, object] = field(default_factory=dict)

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return f"{self.name}: statistic={self.statistic:.6g} threshold={self.threshold:.6g} [{verdict}]"


@dataclass
class VerificationReport:
    urn: str
    regime: IndexClass
    results: List[TestResult]
    master_seed: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_text(self) -> str:
        lines = [
            f"urn = {self.urn}",
            f"regime = {self.regime.value}",
            f"master_seed = {self.master_seed}",
        ]
        for r in self.results:
            lines.append(r.line())
            for k, v in sorted(r.details.items()):
                lines.append(f"  {k} = {v}")
        lines.append(f"overall = {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def csv_rows(self) -> List[List[str]]:
        rows = [["test", "statistic", "threshold", "passed", "seed"]]
        for r in self.results:
            rows.append(
                [r.name, format(r.statistic, ".17g"), format(r.threshold, ".17g"),
                 str(r.passed), str(r.seed)]
            )
        return rows


def _params(config: SimulationConfig) -> AffineParams:
    verdict = check_affinity(config.matrix)
    if isinstance(verdict, NotAffine):
        raise UnsupportedRegimeError(
            f"statistical checks require an affine urn (row k={verdict.first_violated_k} violates)"
        )
    return verdict


def verify_clt(
    config: SimulationConfig,
    n: int,
    replicates: int,
    centering: str = "auto",
) -> TestResult:
    """One-sample KS test of the standardized final white count.

    centering: "exact" uses the exact mean and sd at n (sharper at desk
    scale), "asymptotic" uses the theorem's constants, "auto" picks exact
    below n = 10^4.
    """
    params = _params(config)
    T0 = config.W0 + config.B0
    cls = classify(params, T0)
    if cls.index_class not in (IndexClass.SMALL_INDEX, IndexClass.CRITICAL_INDEX):
        raise UnsupportedRegimeError(f"CLT check covers small/critical index, not {cls.index_class.value}")
    critical = cls.index_class is IndexClass.CRITICAL_INDEX
    if centering == "auto":
        centering = "exact" if n < 10**4 else "asymptotic"
    _, W = simulate_checkpoints(
        config.matrix, config.model, config.W0, config.B0, n, replicates,
        config.master_seed, checkpoints=[n],
    )
    finals = W[-1].astype(float)
    lam = float(params.urn_index)
    am = params.a_m
    if centering == "exact":
        mean, _, var, _ = moment_series_float(params, config.model, T0, config.W0, n)
        center, scale = mean[n], math.sqrt(var[n])
    else:
        va = variance_asymptotic(params, config.model, T0, config.W0)
        if critical:
            center = 2.0 * am * n
            scale = math.sqrt(float(va.leading_coefficient) * n * math.log(n))
        else:
            center = am * n / (1.0 - lam)
            sd2 = am * params.b0 * lam * lam / (params.m * (1 - lam) ** 2 * (1 - 2 * lam))
            scale = math.sqrt(sd2 * n)
    stat = ks_statistic((finals - center) / scale)
    threshold = (KS_CRITICAL_5PCT if critical else KS_CRITICAL_1PCT) / math.sqrt(replicates)
    return TestResult(
        name="clt-critical-index" if critical else "clt-small-index",
        statistic=stat,
        threshold=threshold,
        passed=stat < threshold,
        seed=config.master_seed,
        details={"n": n, "replicates": replicates, "centering": centering,
                 "index": str(params.urn_index)},
    )


def ratio_limit(params: AffineParams) -> Fraction:
    """a_m/(a_m + b_0); equals a_m/(sigma (1 - index)) identically."""
    lim = Fraction(params.a_m, params.a_m + params.b0)
    assert lim == Fraction(params.a_m) / (params.sigma * (1 - params.urn_index))
    return lim


def check_ratio_convergence(
    config: SimulationConfig,
    checkpoints: Optional[Sequence[int]] = None,
    epsilon: float = 0.01,
    precomputed: Optional[Tuple[Sequence[int], np.ndarray]] = None,
    monotone_from: int = 8,
) -> TestResult:
    """Mean |W_n/T_n - limit| decreasing along checkpoints and < epsilon at the end."""
    params = _params(config)
    T0 = config.W0 + config.B0
    cls = classify(params, T0)
    if cls.index_class is IndexClass.TRIANGULAR or params.urn_index >= 1:
        raise UnsupportedRegimeError("ratio convergence needs a nontriangular urn with index < 1")
    lim = float(ratio_limit(params))
    if precomputed is not None:
        cps, W = precomputed
    else:
        cps = tuple(checkpoints) if checkpoints is not None else dyadic_checkpoints(config.n_steps)
        cps, W = simulate_checkpoints(
            config.matrix, config.model, config.W0, config.B0, config.n_steps,
            config.replicates, config.master_seed, checkpoints=cps,
        )
    totals = T0 + params.sigma * np.asarray(cps, dtype=float)
    dev = np.abs(W / totals[:, None] - lim).mean(axis=1)
    # deviations can build up over the first few steps when W0/T0 starts
    # at the limit; the decay claim is asymptotic
    start = next((i for i, c in enumerate(cps) if c >= monotone_from), 0)
    monotone = bool(np.all(np.diff(dev[start:]) <= 0))
    final = float(dev[-1])
    return TestResult(
        name="ratio-convergence",
        statistic=final,
        threshold=epsilon,
        passed=monotone and final < epsilon,
        seed=config.master_seed,
        details={"limit": lim, "monotone_decreasing": monotone,
                 "deviations": [format(d, ".3e") for d in dev],
                 "checkpoints": list(map(int, cps))},
    )


def check_l2_convergence(
    config: SimulationConfig,
    checkpoints: Optional[Sequence[int]] = None,
    cauchy_fraction: float = 0.05,
    constant_tolerance: float = 0.10,
    monotone_from: int = 4,
) -> TestResult:
    """Cauchy criterion for the compensated martingale, plus the C Q^2 match.

    For triangular urns with a_m = 0 the plain product martingale g_n W_n is
    used and only the Cauchy part applies.
    """
    params = _params(config)
    T0 = config.W0 + config.B0
    cls = classify(params, T0)
    triangular = cls.index_class is IndexClass.TRIANGULAR
    if not triangular and cls.index_class is not IndexClass.LARGE_INDEX:
        raise UnsupportedRegimeError(
            f"L2 check covers large-index or triangular urns, not {cls.index_class.value}"
        )
    if triangular and params.a_m != 0:
        raise UnsupportedRegimeError("triangular variant needs a_m = 0 (white-count martingale)")
    n_max = config.n_steps
    cps = tuple(checkpoints) if checkpoints is not None else dyadic_checkpoints(n_max)
    if T0 + params.drift() <= 0:
        raise UnsupportedRegimeError(
            "martingale compensator undefined: T0 + m(a_m_minus_1 - a_m) <= 0"
        )
    cps, W = simulate_checkpoints(
        config.matrix, config.model, config.W0, config.B0, n_max,
        config.replicates, config.master_seed, checkpoints=cps,
    )
    mean, _, _, g = moment_series_float(params, config.model, T0, config.W0, n_max)
    g_cp = g[np.asarray(cps)]
    if triangular:
        mart = g_cp[:, None] * W
        name = "martingale-convergence-triangular"
    else:
        mart = g_cp[:, None] * (W - mean[np.asarray(cps)][:, None])
        name = "l2-convergence-large-index"
    diffs = np.mean(np.diff(mart, axis=0) ** 2, axis=1)  # E[(M_{cp+1} - M_cp)^2]
    var_final = float(np.var(mart[-1], ddof=1))
    # blocks below monotone_from hold different numbers of one-step
    # increments, so the decay only sets in from there
    start = next((i for i, c in enumerate(cps[1:]) if c >= monotone_from), 0)
    monotone = bool(np.all(np.diff(diffs[start:]) <= 0))
    final_ok = diffs[-1] < cauchy_fraction * var_final
    details: Dict[str, object] = {
        "cauchy_diffs": [format(d, ".3e") for d in diffs],
        "monotone_decreasing": monotone,
        "var_final": var_final,
        "checkpoints": list(map(int, cps)),
    }
    passed = monotone and bool(final_ok)
    stat = float(diffs[-1] / var_final) if var_final > 0 else 0.0
    if not triangular:
        va = variance_asymptotic(params, config.model, T0, config.W0)
        from .asymptotics import expansion_constants

        Q = expansion_constants(params, config.model, T0, config.W0).Q
        target = float(va.constant_C) * Q * Q
        rel = abs(var_final - target) / target
        details["C_Q2_target"] = target
        details["C_Q2_relative_error"] = rel
        passed = passed and rel < constant_tolerance
    return TestResult(
        name=name,
        statistic=stat,
        threshold=cauchy_fraction,
        passed=passed,
        seed=config.master_seed,
        details=details,
    )


def run_battery(config: SimulationConfig) -> VerificationReport:
    """Regime-appropriate battery: CLT, ratio convergence, L2/martingale."""
    params = _params(config)
    T0 = config.W0 + config.B0
    cls = classify(params, T0)
    results: List[TestResult] = []

    def attempt(fn, *args, **kwargs):
        try:
            results.append(fn(*args, **kwargs))
        except UnsupportedRegimeError as exc:
            results.append(
                TestResult(
                    name=f"{fn.__name__} (unsupported)", statistic=float("nan"),
                    threshold=float("nan"), passed=True, seed=config.master_seed,
                    details={"note": str(exc)},
                )
            )

    attempt(verify_clt, config, config.n_steps, config.replicates)
    attempt(check_ratio_convergence, config)
    attempt(check_l2_convergence, config)
    urn = (
        f"m={params.m} a={config.matrix.a} sigma={params.sigma} "
        f"model={config.model.value} W0={config.W0} B0={config.B0}"
    )
    return VerificationReport(urn=urn, regime=cls.index_class, results=results,
                              master_seed=config.master_seed)


__all__ = [
    "KS_CRITICAL_1PCT",
    "KS_CRITICAL_5PCT",
    "UnsupportedRegimeError",
    "normal_cdf",
    "ks_statistic",
    "TestResult",
    "VerificationReport",
    "verify_clt",
    "ratio_limit",
    "check_ratio_convergence",
    "check_l2_convergence",
    "run_battery",
]
