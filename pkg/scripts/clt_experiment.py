"""Standardized final white counts vs the Gaussian limit.

Simulates the small-index and critical-index presets, standardizes the
finals with the exact mean and standard deviation, and writes the sorted
standardized sample with normal quantiles alongside (a Q-Q plot in CSV
form), plus the KS statistic per case.

Usage: python scripts/clt_experiment.py [outdir] [replicates]
"""

import csv
import sys

import numpy as np

from multidraw_urn import (
    ReplacementMatrix,
    SamplingModel,
    SimulationConfig,
    check_affinity,
    ks_statistic,
    moment_series_float,
    simulate_checkpoints,
)
from multidraw_urn.verify import normal_cdf

CASES = [
    ("friedman", ReplacementMatrix(2, (0, 1, 2), 2), 1, 1, 2000),
    ("critical", ReplacementMatrix(2, (3, 2, 1), 4), 2, 2, 5000),
]

SEED = 20240817


def main(outdir: str, replicates: int) -> None:
    for name, matrix, W0, B0, n in CASES:
        params = check_affinity(matrix)
        model = SamplingModel.WITHOUT_REPLACEMENT
        _, W = simulate_checkpoints(matrix, model, W0, B0, n, replicates, SEED, [n])
        mean, _, var, _ = moment_series_float(params, model, W0 + B0, W0, n)
        z = np.sort((W[-1] - mean[n]) / np.sqrt(var[n]))
        stat = ks_statistic(z)
        path = f"{outdir}/clt_{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "standardized", "normal_cdf", "empirical_cdf"])
            for i, value in enumerate(z):
                w.writerow([i + 1, f"{value:.8g}", f"{normal_cdf(value):.8g}",
                            f"{(i + 1) / len(z):.8g}"])
        print(f"{name}: n={n} R={replicates} KS={stat:.5f} "
              f"(1% gate {1.628 / np.sqrt(replicates):.5f}) -> {path}")


if __name__ == "__main__":
    outdir = sys.argv[1] if len(sys.argv) > 1 else "."
    reps = int(sys.argv[2]) if len(sys.argv) > 2 else 10**4
    main(outdir, reps)
