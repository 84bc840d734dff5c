import math

import numpy as np
import pytest

from multidraw_urn import (
    SamplingModel,
    SimulationConfig,
    UnsupportedRegimeError,
    check_l2_convergence,
    check_ratio_convergence,
    ks_statistic,
    ratio_limit,
    run_battery,
    verify_clt,
)
from multidraw_urn.urn import AffineParams, ReplacementMatrix
from multidraw_urn.verify import normal_cdf

FRIEDMAN = ReplacementMatrix(2, (0, 1, 2), 2)
CRITICAL = ReplacementMatrix(2, (3, 2, 1), 4)
TRIANGULAR = ReplacementMatrix(2, (2, 1, 0), 2)


def test_normal_cdf_values():
    assert normal_cdf(0.0) == 0.5
    assert math.isclose(normal_cdf(1.959963984540054), 0.975, abs_tol=1e-9)
    assert normal_cdf(40.0) == 1.0


def test_ks_statistic_zeros():
    assert ks_statistic(np.zeros(10)) == 0.5


def test_ks_statistic_optimal_grid():
    # quantile grid at (i - 1/2)/N keeps both one-sided gaps at 1/(2N)
    import mpmath

    N = 1000

    grid = [float(mpmath.sqrt(2) * mpmath.erfinv(2 * (i - 0.5) / N - 1)) for i in range(1, N + 1)]
    assert math.isclose(ks_statistic(grid), 1 / (2 * N), rel_tol=1e-6)


def test_ks_statistic_extreme_point():
    assert ks_statistic([50.0]) > 0.999


def test_ks_harness_calibration():
    # i.i.d. standard normal samples should pass the 1% KS gate almost always
    rng = np.random.Generator(np.random.Philox(2718))
    passes = 0
    reps, N = 100, 10**4
    for _ in range(reps):
        stat = ks_statistic(rng.standard_normal(N))
        if stat < 1.628 / math.sqrt(N):
            passes += 1
    assert passes >= 95


def test_ratio_limit_identity():
    from fractions import Fraction

    assert ratio_limit(AffineParams(2, 1, 2, 2)) == Fraction(1, 2)
    assert ratio_limit(AffineParams(2, 2, 1, 4)) == Fraction(1, 2)
    assert ratio_limit(AffineParams(3, 3, 1, 8)) == Fraction(1, 2)
    assert ratio_limit(AffineParams(1, 3, 1, 5)) == Fraction(1, 3)


def test_verify_clt_small_index_runs():
    cfg = SimulationConfig(FRIEDMAN, SamplingModel.WITHOUT_REPLACEMENT, 1, 1, 2000, 2000, 1)
    res = verify_clt(cfg, 2000, 2000, centering="exact")
    assert res.name == "clt-small-index"
    assert res.statistic < 3 * res.threshold  # sanity bound, not the acceptance gate
    assert res.details["centering"] == "exact"


def test_verify_clt_rejects_wrong_regime():
    big = ReplacementMatrix(3, (7, 5, 3, 1), 8)
    cfg = SimulationConfig(big, SamplingModel.WITH_REPLACEMENT, 4, 4, 100, 10, 0)
    with pytest.raises(UnsupportedRegimeError):
        verify_clt(cfg, 100, 10)
    deg = ReplacementMatrix(2, (1, 1, 1), 2)
    with pytest.raises(UnsupportedRegimeError):
        verify_clt(SimulationConfig(deg, SamplingModel.WITHOUT_REPLACEMENT, 1, 1, 10, 10, 0), 10, 10)


def test_ratio_convergence_friedman():
    cfg = SimulationConfig(FRIEDMAN, SamplingModel.WITH_REPLACEMENT, 1, 1, 4096, 500, 23)
    res = check_ratio_convergence(cfg, epsilon=0.05)
    assert res.passed
    assert res.details["limit"] == 0.5


def test_ratio_convergence_rejects_triangular():
    cfg = SimulationConfig(TRIANGULAR, SamplingModel.WITHOUT_REPLACEMENT, 2, 2, 64, 10, 0)
    with pytest.raises(UnsupportedRegimeError):
        check_ratio_convergence(cfg)


def test_l2_convergence_triangular_variant():
    cfg = SimulationConfig(TRIANGULAR, SamplingModel.WITHOUT_REPLACEMENT, 2, 2, 4096, 2000, 31)
    res = check_l2_convergence(cfg)
    assert res.name == "martingale-convergence-triangular"
    assert "C_Q2_target" not in res.details
    assert res.passed


def test_l2_convergence_rejects_small_index():
    cfg = SimulationConfig(FRIEDMAN, SamplingModel.WITHOUT_REPLACEMENT, 1, 1, 64, 10, 0)
    with pytest.raises(UnsupportedRegimeError):
        check_l2_convergence(cfg)


def test_battery_reports_unsupported_without_failing():
    deg_adjacent = SimulationConfig(CRITICAL, SamplingModel.WITH_REPLACEMENT, 2, 2, 512, 400, 13)
    report = run_battery(deg_adjacent)
    names = [r.name for r in report.results]
    assert any("l2" in n or "unsupported" in n for n in names)
    text = report.to_text()
    assert "regime = critical-index" in text
    rows = report.csv_rows()
    assert rows[0][0] == "test"
    assert len(rows) == len(report.results) + 1


def test_report_reproducible():
    cfg = SimulationConfig(FRIEDMAN, SamplingModel.WITHOUT_REPLACEMENT, 1, 1, 256, 300, 77)
    r1 = run_battery(cfg)
    r2 = run_battery(cfg)
    assert r1.to_text() == r2.to_text()
