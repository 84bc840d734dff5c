"""Variance growth across the three regimes.

Writes one CSV per preset urn with the exact variance rescaled by the
regime's predicted order, so the columns converge to the theorem
coefficients.  Plot n (log axis) against the last column to see it.

Usage: python scripts/variance_regimes.py [outdir]
"""

import csv
import math
import sys

from multidraw_urn import (
    ReplacementMatrix,
    SamplingModel,
    check_affinity,
    critical_index_coefficient,
    large_index_constant,
    moment_series_float,
    small_index_slope,
)

CASES = [
    ("friedman", ReplacementMatrix(2, (0, 1, 2), 2), 1, 1, 10**5),
    ("critical", ReplacementMatrix(2, (3, 2, 1), 4), 2, 2, 10**6),
    ("large-index", ReplacementMatrix(3, (7, 5, 3, 1), 8), 4, 4, 10**5),
]


def scaling(params, n):
    lam = float(params.urn_index)
    if lam < 0.5:
        return n
    if lam == 0.5:
        return n * math.log(n) if n > 1 else n
    return n ** (2 * lam)


def main(outdir: str) -> None:
    for name, matrix, W0, B0, n_max in CASES:
        params = check_affinity(matrix)
        lam = params.urn_index
        targets = {}
        for model in SamplingModel:
            if lam < 0.5:
                targets[model] = float(small_index_slope(params))
            elif lam == 0.5:
                targets[model] = float(critical_index_coefficient(params))
            else:
                targets[model], _ = large_index_constant(params, model, W0 + B0, W0)
        path = f"{outdir}/variance_{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "V_M", "V_R", "V_M_rescaled", "V_R_rescaled",
                        "target_M", "target_R"])
            series = {
                model: moment_series_float(params, model, W0 + B0, W0, n_max)[2]
                for model in SamplingModel
            }
            n = 1
            while n <= n_max:
                s = scaling(params, n)
                vm = series[SamplingModel.WITHOUT_REPLACEMENT][n]
                vr = series[SamplingModel.WITH_REPLACEMENT][n]
                w.writerow([n, f"{vm:.8g}", f"{vr:.8g}", f"{vm / s:.8g}", f"{vr / s:.8g}",
                            f"{targets[SamplingModel.WITHOUT_REPLACEMENT]:.8g}",
                            f"{targets[SamplingModel.WITH_REPLACEMENT]:.8g}"])
                n *= 2
        print(f"wrote {path} (index {lam})")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
