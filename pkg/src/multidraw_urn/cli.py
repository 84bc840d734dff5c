"""Command-line front end.

Subcommands: classify, exact, oracle-check, simulate, verify.  Configs are
flat key = value files (configparser syntax); see README for the grammar.
Exit codes: 0 ok, 1 parse error, 2 nonaffine, 3 nontenable, 4 verification
or assumption failure.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import csv
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import asymptotics, exact, oracle, simulate, verify
from .urn import (
    AffineParams,
    IndexClass,
    NotAffine,
    ReplacementMatrix,
    SamplingModel,
    check_affinity,
    classify,
    validate_tenability,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NONAFFINE = 2
EXIT_NONTENABLE = 3
EXIT_VERIFY = 4

WORKER_ENV = "MULTIDRAW_URN_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    matrix: ReplacementMatrix
    model: SamplingModel
    W0: int
    B0: int
    n_max: int = 100
    n_steps: int = 1000
    replicates: int = 1000
    seed: int = 0
    checkpoints: Optional[Tuple[int, ...]] = None
    epsilon: float = 0.01
    tolerance: float = 1e-3


PRESETS: Dict[str, dict] = {
    # every draw adds one ball of each colour: deterministic white count
    "degenerate": dict(m=2, a=[1, 1, 1], sigma=2, w0=1, b0=1),
    # generalized Friedman scheme, sample size 2, swap constant 1
    "friedman": dict(m=2, a=[0, 1, 2], sigma=2, w0=2, b0=2),
    # generalized Polya scheme: reinforce the drawn colours
    "polya": dict(m=2, a=[2, 1, 0], sigma=2, w0=1, b0=1),
    # gate inputs sampled in pairs; output replaces one input
    "logic-circuit": dict(m=2, a=[-1, 0, 1], sigma=1, w0=2, b0=2),
    "critical": dict(m=2, a=[3, 2, 1], sigma=4, w0=2, b0=2),
    "large-index": dict(m=3, a=[7, 5, 3, 1], sigma=8, w0=4, b0=4),
}


def _parse_int_list(text: str) -> List[int]:
    value = ast.literal_eval(text.strip())
    if not isinstance(value, (list, tuple)) or not all(isinstance(v, int) for v in value):
        raise ConfigError(f"expected a list of integers, got {text!r}")
    return list(value)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    section: Dict[str, str] = {}
    run_opts: Dict[str, str] = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        section = {k: str(v) for k, v in PRESETS[args.preset].items()}
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ConfigError(f"config file not found: {args.config}")
        if parser.has_section("urn"):
            section.update(dict(parser.items("urn")))
        if parser.has_section("run"):
            run_opts = dict(parser.items("run"))
    if not section:
        raise ConfigError("no urn given: use --preset or --config with an [urn] section")
    try:
        m = int(section["m"])
        sigma = int(section["sigma"])
        if "a" in section:
            if "a_m_minus_1" in section or "a_m" in section:
                raise ConfigError("give either a = [...] or the affine shorthand, not both")
            rows = _parse_int_list(section["a"])
            matrix = ReplacementMatrix(m, tuple(rows), sigma)
        elif "a_m_minus_1" in section and "a_m" in section:
            matrix = ReplacementMatrix.from_affine(
                m, int(section["a_m_minus_1"]), int(section["a_m"]), sigma
            )
        else:
            raise ConfigError("urn needs a = [...] or a_m_minus_1/a_m shorthand")
        model = SamplingModel.parse(section.get("model", "M"))
        W0 = int(section["w0"])
        B0 = int(section["b0"])
    except ConfigError:
        raise
    except (KeyError, ValueError) as err:
        raise ConfigError(f"bad urn section: {err}")
    cfg = ExperimentConfig(matrix=matrix, model=model, W0=W0, B0=B0)
    for key, cast in (
        ("n_max", int), ("n_steps", int), ("replicates", int), ("seed", int),
        ("epsilon", float), ("tolerance", float),
    ):
        if key in run_opts:
            try:
                setattr(cfg, key, cast(run_opts[key]))
            except ValueError as err:
                raise ConfigError(f"bad run option {key}: {err}")
    if "checkpoints" in run_opts:
        cfg.checkpoints = _parse_checkpoints(run_opts["checkpoints"], cfg.n_steps)
    # command-line overrides
    if getattr(args, "model", None):
        cfg.model = SamplingModel.parse(args.model)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "checkpoints", None):
        cfg.checkpoints = _parse_checkpoints(args.checkpoints, cfg.n_steps)
    if getattr(args, "n_max", None) is not None:
        cfg.n_max = args.n_max
    if getattr(args, "n_steps", None) is not None:
        cfg.n_steps = args.n_steps
    if getattr(args, "replicates", None) is not None:
        cfg.replicates = args.replicates
    return cfg


def _parse_checkpoints(text: str, n_steps: int) -> Optional[Tuple[int, ...]]:
    text = text.strip()
    if text == "dyadic":
        return None  # simulator default
    try:
        values = tuple(sorted({int(v) for v in text.split(",")}))
    except ValueError:
        raise ConfigError(f"checkpoints must be 'dyadic' or a comma list, got {text!r}")
    if not values or values[0] < 1:
        raise ConfigError("checkpoints must be positive")
    return values


TABLE_ROWS = {
    IndexClass.DEGENERATE: ("W_n = W_0 + c n exactly", "0", "deterministic"),
    IndexClass.TRIANGULAR: ("regime-specific", "regime-specific", "product-martingale limit"),
    IndexClass.SMALL_INDEX: ("~ n", "~ n", "Gaussian"),
    IndexClass.CRITICAL_INDEX: ("~ n", "~ n log n", "Gaussian"),
    IndexClass.LARGE_INDEX: ("~ n", "~ n^(2 lambda)", "martingale limit (model-dependent)"),
}


def cmd_classify(cfg: ExperimentConfig, out: Optional[str]) -> int:
    lines: List[str] = []
    for model in SamplingModel:
        rep = validate_tenability(cfg.matrix, model)
        lines.append(f"tenable[{model.value}] = {bool(rep)}")
        for d in rep.diagnostics:
            lines.append(f"  {d}")
    verdict = check_affinity(cfg.matrix)
    if isinstance(verdict, NotAffine):
        lines.append(f"affine = no (row k={verdict.first_violated_k} violates the condition)")
        print("\n".join(lines))
        return EXIT_NONAFFINE
    T0 = cfg.W0 + cfg.B0
    cls = classify(verdict, T0)
    mean_o, var_o, law = TABLE_ROWS[cls.index_class]
    lines += [
        "affine = yes",
        f"index = {cls.urn_index}",
        f"regime = {cls.index_class.value}",
        f"b0 = {verdict.b0}",
        f"restart_required = {cls.restart_required}",
        f"mean_order = {mean_o}",
        f"variance_order = {var_o}",
        f"limit_law = {law}",
    ]
    text = "\n".join(lines)
    print(text)
    if out:
        with open(os.path.join(out, "classify.txt"), "w") as fh:
            fh.write(text + "\n")
    if not validate_tenability(cfg.matrix, cfg.model):
        return EXIT_NONTENABLE
    return EXIT_OK


def _require_affine_tenable(cfg: ExperimentConfig) -> Tuple[Optional[AffineParams], int]:
    if not validate_tenability(cfg.matrix, cfg.model):
        print("untenable urn for model " + cfg.model.value, file=sys.stderr)
        return None, EXIT_NONTENABLE
    verdict = check_affinity(cfg.matrix)
    if isinstance(verdict, NotAffine):
        print(f"nonaffine urn (row k={verdict.first_violated_k})", file=sys.stderr)
        return None, EXIT_NONAFFINE
    return verdict, EXIT_OK


def cmd_exact(cfg: ExperimentConfig, out: Optional[str], oracle_check: bool) -> int:
    params, code = _require_affine_tenable(cfg)
    if params is None:
        return code
    T0 = cfg.W0 + cfg.B0
    if T0 + params.drift() <= 0:
        print(
            f"positivity assumption fails: T0 + m(a_m_minus_1 - a_m) = {T0 + params.drift()} <= 0; "
            "restart with a later step as time zero",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    series = exact.moment_series(params, cfg.model, T0, cfg.W0, cfg.n_max)
    extras: Dict[str, list] = {}
    if params.urn_index < 1 and params.eigen_gap != 0:
        extras["mean_asymptotic"] = [
            asymptotics.mean_asymptotic(params, T0, cfg.W0, n) if n > 0 else float(cfg.W0)
            for n in range(cfg.n_max + 1)
        ]
    path = os.path.join(out or ".", "exact.csv")
    series.to_csv(path, extra_columns=extras or None)
    print(f"wrote {path}")
    if oracle_check:
        horizon = min(cfg.n_max, 8)
        for n in range(horizon + 1):
            dist = oracle.evolve(cfg.matrix, cfg.model, cfg.W0, cfg.B0, n)
            mean, second = oracle.oracle_moments(dist)
            if mean != series.mean[n] or second != series.second[n]:
                print(f"oracle mismatch at n={n}: {mean} vs {series.mean[n]}", file=sys.stderr)
                return EXIT_VERIFY
        print(f"oracle check passed for n <= {horizon}")
    return EXIT_OK


def cmd_oracle_check(cfg: ExperimentConfig, out: Optional[str]) -> int:
    saved = cfg.n_max
    cfg.n_max = min(cfg.n_max, 8)
    try:
        return cmd_exact(cfg, out, oracle_check=True)
    finally:
        cfg.n_max = saved


def cmd_simulate(cfg: ExperimentConfig, out: Optional[str]) -> int:
    params, code = _require_affine_tenable(cfg)
    if params is None:
        return code
    outdir = out or "."
    cps, W = simulate.simulate_checkpoints(
        cfg.matrix, cfg.model, cfg.W0, cfg.B0, cfg.n_steps, cfg.replicates,
        cfg.seed, checkpoints=cfg.checkpoints,
    )
    T0 = cfg.W0 + cfg.B0
    summary = os.path.join(outdir, "summary.csv")
    simulate.summary_to_csv(cps, W, T0, cfg.matrix.sigma, summary)
    trace_path = os.path.join(outdir, "trace.csv")
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "n", "W", "ratio"])
        for i, n in enumerate(cps):
            total = T0 + cfg.matrix.sigma * int(n)
            for rep in range(W.shape[1]):
                writer.writerow(
                    [rep, int(n), int(W[i, rep]), format(W[i, rep] / total, ".17g")]
                )
    print(f"wrote {summary}\nwrote {trace_path}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Optional[str]) -> int:
    params, code = _require_affine_tenable(cfg)
    if params is None:
        return code
    sim_cfg = simulate.SimulationConfig(
        cfg.matrix, cfg.model, cfg.W0, cfg.B0, cfg.n_steps, cfg.replicates,
        cfg.seed, checkpoints=cfg.checkpoints,
    )
    report = verify.run_battery(sim_cfg)
    print(report.to_text())
    if out:
        with open(os.path.join(out, "verify.csv"), "w", newline="") as fh:
            csv.writer(fh).writerows(report.csv_rows())
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multidraw-urn",
        description="Balanced two-colour urns with multiple drawings: "
        "classification, exact moments, simulation, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "exact", "oracle-check", "simulate", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--preset", help=f"one of: {', '.join(sorted(PRESETS))}")
        p.add_argument("--model", choices=["M", "R"], help="override sampling model")
        p.add_argument("--seed", type=int, help="master seed (64-bit)")
        p.add_argument("--out", help="output directory (default: cwd)")
        p.add_argument("--checkpoints", help="'dyadic' or comma-separated list")
        if name in ("exact", "oracle-check"):
            p.add_argument("--n-max", type=int, dest="n_max")
            p.add_argument("--oracle-check", action="store_true")
        if name in ("simulate", "verify"):
            p.add_argument("--n-steps", type=int, dest="n_steps")
            p.add_argument("--replicates", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    # worker cap honoured for future parallel reductions; current engines
    # are single-threaded so any value is accepted
    workers = os.environ.get(WORKER_ENV)
    if workers is not None:
        try:
            if int(workers) < 1:
                print(f"{WORKER_ENV} must be >= 1", file=sys.stderr)
                return EXIT_PARSE
        except ValueError:
            print(f"{WORKER_ENV} must be an integer", file=sys.stderr)
            return EXIT_PARSE
    try:
        cfg = load_config(args)
    except (ConfigError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_PARSE
    out = getattr(args, "out", None)
    if out:
        os.makedirs(out, exist_ok=True)
    try:
        if args.command == "classify":
            return cmd_classify(cfg, out)
        if args.command == "exact":
            return cmd_exact(cfg, out, getattr(args, "oracle_check", False))
        if args.command == "oracle-check":
            return cmd_oracle_check(cfg, out)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, out)
    except exact.RestartRequiredError as err:
        print(str(err), file=sys.stderr)
        return EXIT_VERIFY
    except ValueError as err:
        print(str(err), file=sys.stderr)
        return EXIT_PARSE
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
