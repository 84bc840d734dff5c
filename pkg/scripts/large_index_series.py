"""Convergence of the large-index variance constant.

Tabulates the series value for the constant C at increasing truncation
depths against the exact-engine reference V[W_n]/n^{2 lambda}, for both
sampling models on the large-index preset.

Usage: python scripts/large_index_series.py
"""

from multidraw_urn import (
    ReplacementMatrix,
    SamplingModel,
    check_affinity,
    large_index_constant,
    moment_series_float,
)

MATRIX = ReplacementMatrix(3, (7, 5, 3, 1), 8)
W0 = B0 = 4


def main() -> None:
    params = check_affinity(MATRIX)
    lam = float(params.urn_index)
    n_ref = 10**5
    print(f"urn a={MATRIX.a} sigma={MATRIX.sigma}, index {params.urn_index}")
    for model in SamplingModel:
        _, _, var, _ = moment_series_float(params, model, W0 + B0, W0, n_ref)
        reference = var[n_ref] / n_ref ** (2 * lam)
        print(f"model {model.value}: V[W_n]/n^(2 lambda) at n={n_ref}: {reference:.6f}")
        for terms in (10**3, 10**4, 10**5, 4 * 10**5):
            C, bound = large_index_constant(params, model, W0 + B0, W0,
                                            tolerance=0, max_terms=terms)
            print(f"  J={terms:>7}: C={C:.6f}  tail bound {bound:.2e}  "
                  f"gap to reference {abs(C - reference) / reference:.2%}")


if __name__ == "__main__":
    main()
