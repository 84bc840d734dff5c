"""Seeded Monte Carlo for the urn process under both sampling models.

Two engines share one drawing kernel semantics:

* `run` evolves each replicate on its own counter-based stream and can
  record full paths and martingale transforms; intended for modest n.
* `simulate_checkpoints` evolves all replicates at once on a single
  stream with vectorized pmf evaluation, recording only checkpoint
  snapshots; intended for n ~ 10^5 and beyond.

Both are bit-reproducible given (master_seed, replicate layout).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .kernels import binomial_pmf, hypergeometric_pmf, sample_draw
from .urn import ReplacementMatrix, SamplingModel, validate_tenability

RECORD_RAW = "raw"
RECORD_FINAL = "final"
RECORD_MARTINGALE = "martingale"
RECORD_RATIO = "ratio"


def dyadic_checkpoints(n_steps: int) -> Tuple[int, ...]:
    """1, 2, 4, ... up to n_steps, always including n_steps itself."""
    out: List[int] = []
    k = 1
    while k < n_steps:
        out.append(k)
        k *= 2
    out.append(n_steps)
    return tuple(out)


@dataclass(frozen=True)
class SimulationConfig:
    matrix: ReplacementMatrix
    model: SamplingModel
    W0: int
    B0: int
    n_steps: int
    replicates: int
    master_seed: int
    record: frozenset = frozenset({RECORD_FINAL})
    checkpoints: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.W0 < 0 or self.B0 < 0 or self.W0 + self.B0 < self.matrix.m:
            raise ValueError("need W0, B0 >= 0 and W0 + B0 >= m")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        report = validate_tenability(self.matrix, self.model)
        if not report:
            raise ValueError("untenable urn: " + "; ".join(report.diagnostics))

    def effective_checkpoints(self) -> Tuple[int, ...]:
        if self.checkpoints is not None:
            return tuple(sorted(set(self.checkpoints)))
        return dyadic_checkpoints(self.n_steps)


@dataclass
class SimulationTrace:
    replicate_id: int
    steps: np.ndarray  # recorded step indices
    W: np.ndarray  # white counts at those steps
    total: np.ndarray
    ratio: Optional[np.ndarray] = None
    martingale_W: Optional[np.ndarray] = None
    martingale_frak: Optional[np.ndarray] = None


def _replicate_rng(master_seed: int, replicate_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((master_seed, replicate_id))))


def run(config: SimulationConfig) -> List[SimulationTrace]:
    """Per-replicate evolution; each replicate owns stream (seed, id)."""
    m = config.matrix.m
    record_raw = RECORD_RAW in config.record
    steps = (
        np.arange(config.n_steps + 1)
        if record_raw
        else np.asarray((0,) + config.effective_checkpoints())
    )
    want = set(int(s) for s in steps)
    traces: List[SimulationTrace] = []
    for rep in range(config.replicates):
        rng = _replicate_rng(config.master_seed, rep)
        w, total = config.W0, config.W0 + config.B0
        ws, totals = [], []
        if 0 in want:
            ws.append(w)
            totals.append(total)
        for step in range(1, config.n_steps + 1):
            dist = (
                hypergeometric_pmf(w, total, m)
                if config.model is SamplingModel.WITHOUT_REPLACEMENT
                else binomial_pmf(w, total, m)
            )
            k = sample_draw(dist, rng)
            w += config.matrix.white_added(k)
            total += config.matrix.sigma
            if not 0 <= w <= total:
                raise AssertionError(
                    f"tenability violation at step {step}: W={w} outside [0, {total}] "
                    f"(validator bug for matrix {config.matrix.a}, model {config.model.value})"
                )
            if step in want:
                ws.append(w)
                totals.append(total)
        trace = SimulationTrace(
            replicate_id=rep,
            steps=steps.copy(),
            W=np.asarray(ws, dtype=np.int64),
            total=np.asarray(totals, dtype=np.int64),
        )
        if RECORD_RATIO in config.record:
            trace.ratio = trace.W / trace.total
        traces.append(trace)
    return traces


def martingale_transform(
    trace: SimulationTrace,
    g: Sequence[float],
    mean: Sequence[float],
    a_m: int,
) -> SimulationTrace:
    """Attach the compensated and plain martingale transforms.

    g and mean must be indexed by absolute step (0..n_steps) for the same urn.
    """
    g_arr = np.asarray([float(g[int(s)]) for s in trace.steps])
    mean_arr = np.asarray([float(mean[int(s)]) for s in trace.steps])
    trace.martingale_W = g_arr * (trace.W - mean_arr)
    if a_m == 0:
        trace.martingale_frak = g_arr * trace.W
    return trace


# -- vectorized checkpoint engine -------------------------------------------


def _vector_draw(
    w: np.ndarray,
    T: np.ndarray,
    m: int,
    without: bool,
    u: np.ndarray,
    binom: np.ndarray,
) -> np.ndarray:
    """White counts drawn in one step, one per row.

    The hypergeometric pmf is a product of integer-valued factors, so zero
    probabilities come out exactly zero and no clamping of w is needed.
    """
    n = w.shape[0]
    pmf = np.empty((m + 1, n))
    if without:
        black = T - w
        denom = np.ones(n)
        for i in range(m):
            denom *= T - i
        for k in range(m + 1):
            col = np.full(n, binom[k])
            for i in range(k):
                col *= w - i
            for i in range(m - k):
                col *= black - i
            pmf[k] = col / denom
    else:
        p = w / T
        q = 1.0 - p
        for k in range(m + 1):
            pmf[k] = binom[k] * p**k * q ** (m - k)
    cum = np.cumsum(pmf, axis=0)
    counts = (u > cum).sum(axis=0)
    return np.minimum(counts, m)


def simulate_checkpoints(
    matrix: ReplacementMatrix,
    model: SamplingModel,
    W0: int,
    B0: int,
    n_steps: int,
    replicates: int,
    master_seed: int,
    checkpoints: Optional[Sequence[int]] = None,
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """(checkpoints, W) with W of shape (len(checkpoints), replicates)."""
    cps, mats = simulate_batch(
        [(matrix, model, W0, B0)], n_steps, replicates, master_seed, checkpoints
    )
    return cps, mats[0]


def simulate_batch(
    urns: Sequence[Tuple[ReplacementMatrix, SamplingModel, int, int]],
    n_steps: int,
    replicates: int,
    master_seed: int,
    checkpoints: Optional[Sequence[int]] = None,
) -> Tuple[Tuple[int, ...], List[np.ndarray]]:
    """Run many urns in lockstep on one stream, stacked by (m, model).

    Returns checkpoint list and one (checkpoints, replicates) white-count
    array per urn, in input order.  Reproducible: the stream consumes one
    uniform block per (group, step) regardless of how urns are grouped,
    and groups are keyed by a fixed order.
    """
    cps = tuple(sorted(set(checkpoints))) if checkpoints is not None else dyadic_checkpoints(n_steps)
    if cps[-1] > n_steps:
        raise ValueError("checkpoint beyond n_steps")
    groups: Dict[Tuple[int, str], List[int]] = {}
    for idx, (matrix, mod, _, _) in enumerate(urns):
        report = validate_tenability(matrix, mod)
        if not report:
            raise ValueError(f"untenable urn #{idx}: " + "; ".join(report.diagnostics))
        groups.setdefault((matrix.m, mod.value), []).append(idx)
    out: List[Optional[np.ndarray]] = [None] * len(urns)
    for gkey in sorted(groups):
        members = groups[gkey]
        m = gkey[0]
        without = gkey[1] == SamplingModel.WITHOUT_REPLACEMENT.value
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence((master_seed, gkey[0], ord(gkey[1]))))
        )
        rows = len(members) * replicates
        w = np.empty(rows)
        T = np.empty(rows)
        sig = np.empty(rows)
        adds = np.empty((len(members), m + 1))
        for slot, idx in enumerate(members):
            matrix, _, W0, B0 = urns[idx]
            sl = slice(slot * replicates, (slot + 1) * replicates)
            w[sl] = W0
            T[sl] = W0 + B0
            sig[sl] = matrix.sigma
            adds[slot] = [matrix.white_added(k) for k in range(m + 1)]
        adds_rows = np.repeat(adds, replicates, axis=0)
        binom = np.asarray([comb(m, k) for k in range(m + 1)], dtype=float)
        snaps = np.empty((len(cps), rows))
        row_ix = np.arange(rows)
        cp_iter = iter(enumerate(cps))
        cp_slot, cp_next = next(cp_iter)
        for step in range(1, cps[-1] + 1):
            u = rng.random(rows)
            k = _vector_draw(w, T, m, without, u, binom)
            w += adds_rows[row_ix, k]
            T += sig
            if step == cp_next:
                snaps[cp_slot] = w
                nxt = next(cp_iter, None)
                if nxt is None:
                    break
                cp_slot, cp_next = nxt
        for slot, idx in enumerate(members):
            sl = slice(slot * replicates, (slot + 1) * replicates)
            out[idx] = snaps[:, sl].astype(np.int64)
    return cps, out  # type: ignore[return-value]


# -- CSV output --------------------------------------------------------------


def traces_to_csv(traces: Sequence[SimulationTrace], path: str) -> None:
    has_frak = any(t.martingale_frak is not None for t in traces)
    header = ["replicate", "n", "W", "ratio", "martingale_W"]
    if has_frak:
        header.append("martingale_frak")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in traces:
            for i, step in enumerate(t.steps):
                ratio = t.W[i] / t.total[i]
                row = [t.replicate_id, int(step), int(t.W[i]), format(ratio, ".17g")]
                row.append(
                    format(t.martingale_W[i], ".17g") if t.martingale_W is not None else ""
                )
                if has_frak:
                    row.append(
                        format(t.martingale_frak[i], ".17g")
                        if t.martingale_frak is not None
                        else ""
                    )
                writer.writerow(row)


def summary_to_csv(
    checkpoints: Sequence[int], W: np.ndarray, T0: int, sigma: int, path: str
) -> None:
    """Per-checkpoint empirical mean/variance of W and of the ratio."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "replicates", "mean_W", "var_W", "mean_ratio", "var_ratio"])
        for i, n in enumerate(checkpoints):
            row_w = W[i].astype(float)
            total = T0 + sigma * n
            ratio = row_w / total
            writer.writerow(
                [
                    int(n),
                    W.shape[1],
                    format(row_w.mean(), ".17g"),
                    format(row_w.var(ddof=1) if W.shape[1] > 1 else 0.0, ".17g"),
                    format(ratio.mean(), ".17g"),
                    format(ratio.var(ddof=1) if W.shape[1] > 1 else 0.0, ".17g"),
                ]
            )


__all__ = [
    "RECORD_RAW",
    "RECORD_FINAL",
    "RECORD_MARTINGALE",
    "RECORD_RATIO",
    "dyadic_checkpoints",
    "SimulationConfig",
    "SimulationTrace",
    "run",
    "martingale_transform",
    "simulate_checkpoints",
    "simulate_batch",
    "traces_to_csv",
    "summary_to_csv",
]
