"""Command-line experiment harness.

Subcommands:
  generate      build a synthetic system and write it to a system file
  solve         run one or more solvers, write per-trial telemetry CSVs
  bounds        evaluate bound curves for a system, write curve CSVs
  netlib-prep   parse an MPS file and write the stacked, normalized system
  timing        mean time/iterations to a residual threshold, solver vs solver

Every flag can also be supplied from a `key = value` config file via
--config; command-line flags override file values. Exit codes: 0 success,
2 configuration error, 3 numerical failure.

The harness only measures and emits CSV artifacts; no inequality checking
happens here (the test suite owns the assertions).
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import linalg, solvers, systems
from . import mps as mps_mod

CONFIG_ERROR = 2
NUMERICAL_ERROR = 3


def _read_config(path: str) -> dict[str, str]:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn --config values into parser defaults so real flags override them."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise ValueError("--config requires a path")
    cfg = _read_config(argv[at + 1])
    argv = argv[:at] + argv[at + 2:]
    by_dest = {a.dest: a for a in parser._actions}
    for key, value in cfg.items():
        action = by_dest.get(key)
        if action is None:
            raise ValueError(f"config key {key!r} does not match any flag")
        if isinstance(action, argparse._AppendAction):
            parsed = [v.strip() for v in value.split(",") if v.strip()]
        elif action.type is not None:
            parsed = action.type(value)
        else:
            parsed = value
        parser.set_defaults(**{key: parsed})
        action.required = False  # the config value satisfies the flag
    return argv


def _add_generator_flags(p: argparse.ArgumentParser, kind_required: bool):
    p.add_argument("--kind", choices=systems.GENERATOR_KINDS, required=kind_required)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--spike-count", type=int, default=0)
    p.add_argument("--spike-magnitude", type=float, default=0.0)
    p.add_argument("--row-mean", type=float, default=1.0)
    p.add_argument("--row-std", type=float, default=0.5)


def _spec_from_args(args) -> systems.GeneratorSpec:
    return systems.GeneratorSpec(
        kind=args.kind, m=args.m, n=args.n, noise_std=args.noise_std,
        spike_count=args.spike_count, spike_magnitude=args.spike_magnitude,
        row_mean=args.row_mean, row_std=args.row_std, seed=args.seed)


def _load_source(args) -> systems.LinearSystem:
    """System source precedence: --system file, then --mps, then generator flags."""
    if getattr(args, "system", None):
        return systems.load_system(args.system)
    if getattr(args, "mps", None):
        problem = mps_mod.load_mps(args.mps)
        A, b = mps_mod.extract_system(problem)
        spec = mps_mod.TransformSpec(noise_std=args.transform_noise_std, seed=args.seed)
        return mps_mod.overdetermine(A, b, spec)
    if getattr(args, "kind", None):
        return systems.generate(_spec_from_args(args))
    raise ValueError("no system source: pass --system, --mps, or generator flags (--kind ...)")


def _resolve_threshold(args, sys_: systems.LinearSystem, flag: float | None) -> float:
    """Explicit flag, else 4*||e||_inf from the reference, else 4*beta."""
    if flag is not None:
        return flag
    if sys_.error_vec is not None:
        return 4.0 * sys_.error_inf()
    beta = getattr(args, "stop_beta", None)
    if beta is not None:
        return 4.0 * beta
    raise ValueError("no threshold: pass the flag, or --stop-beta, or use a system with a reference")


# --------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    sys_ = systems.generate(_spec_from_args(args))
    systems.save_system(args.out, sys_)
    sigma = linalg.min_singular_value(sys_.a)
    print(f"m={sys_.m} n={sys_.n} error_inf={sys_.error_inf():.8g} sigma_min={sigma:.8g}")
    print(f"wrote {args.out}")
    return 0


def cmd_solve(args) -> int:
    sys_ = _load_source(args)
    if not args.solver:
        raise ValueError("at least one --solver is required")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stop = solvers.StopRule(max_iterations=args.max_iterations,
                            residual_inf_threshold=args.stop_residual_inf,
                            error_bound_beta=args.stop_beta)
    summary_rows = []
    for name in args.solver:
        if name == "hybrid":
            rule = solvers.SelectionRule("hybrid", _resolve_threshold(args, sys_, args.hybrid_threshold))
        else:
            rule = solvers.SelectionRule(name)
        for trial in range(args.trials):
            result = solvers.run(sys_, rule, stop, seed=args.seed + trial)
            path = out / f"{name}_trial{trial}.csv"
            solvers.write_telemetry_csv(path, result.records)
            final_error_sq = ""
            if sys_.reference is not None:
                diff = result.state.x - sys_.reference
                final_error_sq = repr(float(np.dot(diff, diff)))
            summary_rows.append([name, trial, result.state.iteration,
                                 final_error_sq, result.stop_reason])
            print(f"wrote {path}")
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver", "trial", "iterations", "final_error_sq", "stop_reason"])
        writer.writerows(summary_rows)
    print(f"wrote {out / 'summary.csv'}")
    return 0


def cmd_bounds(args) -> int:
    sys_ = systems.load_system(args.system)
    if args.empirical_gamma and not args.telemetry:
        raise ValueError("--empirical-gamma requires --telemetry")
    gamma_seq = None
    if args.telemetry:
        records = solvers.read_telemetry_csv(args.telemetry)
        gamma_seq = [r.gamma for r in records if r.gamma is not None]
    inputs = bounds_mod.bound_inputs_from_system(sys_, gamma_seq=gamma_seq)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    k = args.iterations
    curves = {
        "rk_bound.csv": bounds_mod.rk_bound(inputs, k),
        "motzkin_worst_case.csv": bounds_mod.motzkin_bound_worst_case(inputs, k),
        "gaussian_rate.csv": bounds_mod.gaussian_rate_bound(inputs, k, conjectured=False),
        "gaussian_rate_conjectured.csv": bounds_mod.gaussian_rate_bound(inputs, k, conjectured=True),
    }
    if gamma_seq is not None:
        k_emp = min(k, len(gamma_seq))
        curves["motzkin_empirical_gamma.csv"] = bounds_mod.motzkin_bound_empirical_gamma(inputs, k_emp)
    for filename, curve in curves.items():
        bounds_mod.write_curves_csv(out / filename, [curve])
        print(f"wrote {out / filename}")
    return 0


def cmd_netlib_prep(args) -> int:
    problem = mps_mod.load_mps(args.mps)
    A, b = mps_mod.extract_system(problem)
    spec = mps_mod.TransformSpec(noise_std=args.noise_std, seed=args.seed)
    sys_ = mps_mod.overdetermine(A, b, spec)
    systems.save_system(args.out, sys_)
    print(f"problem={problem.name or Path(args.mps).stem} constraints={A.shape[0]}x{A.shape[1]} "
          f"stacked={sys_.m}x{sys_.n} error_inf={sys_.error_inf():.8g}")
    print(f"wrote {args.out}")
    return 0


def cmd_timing(args) -> int:
    sys_ = _load_source(args)
    threshold = _resolve_threshold(args, sys_, args.threshold)
    problem = args.problem or (Path(args.system).stem if args.system else
                               Path(args.mps).stem if args.mps else args.kind)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "timing.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["problem", "solver", "mean_seconds", "mean_iterations", "trials", "censored"])
        for name in args.solver:
            rule = solvers.SelectionRule(name)
            summary = solvers.time_to_threshold(sys_, rule, threshold, args.trials,
                                                seed=args.seed, max_iterations=args.max_iterations)
            writer.writerow([problem, name, f"{summary.mean_seconds:.6f}",
                             f"{summary.mean_iterations:.2f}", summary.trials, summary.censored])
            print(f"{problem} {name}: mean_iterations={summary.mean_iterations:.2f} "
                  f"mean_seconds={summary.mean_seconds:.4f} censored={summary.censored}/{summary.trials}")
    print(f"wrote {path}")
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rowaction",
                                     description="Row-action solver experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic system file")
    _add_generator_flags(p, kind_required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run solvers and write telemetry CSVs")
    p.add_argument("--system", help="path to a saved system file")
    p.add_argument("--mps", help="path to an MPS file (stacked before solving)")
    p.add_argument("--transform-noise-std", type=float, default=1e-6)
    _add_generator_flags(p, kind_required=False)
    p.add_argument("--solver", action="append", choices=solvers.SELECTION_KINDS, default=None)
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--stop-beta", type=float, default=None,
                   help="stop when the residual sup norm is <= 4*beta")
    p.add_argument("--stop-residual-inf", type=float, default=None)
    p.add_argument("--hybrid-threshold", type=float, default=None)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bounds", help="evaluate bound curves for a system")
    p.add_argument("--system", required=True)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--telemetry", help="telemetry CSV supplying the empirical gamma sequence")
    p.add_argument("--empirical-gamma", action="store_true",
                   help="require the empirical-gamma curve (errors without --telemetry)")
    p.add_argument("--out", default=".")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("netlib-prep", help="MPS file to stacked system file")
    p.add_argument("--mps", required=True)
    p.add_argument("--noise-std", type=float, default=1e-6)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_netlib_prep)

    p = sub.add_parser("timing", help="mean time/iterations to a residual threshold")
    p.add_argument("--system")
    p.add_argument("--mps")
    p.add_argument("--transform-noise-std", type=float, default=1e-6)
    _add_generator_flags(p, kind_required=False)
    p.add_argument("--problem", help="label for the CSV rows")
    p.add_argument("--threshold", type=float, default=None,
                   help="residual sup-norm target; defaults to 4*||e||_inf of the reference")
    p.add_argument("--solver", action="append", choices=solvers.SELECTION_KINDS, default=None)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--max-iterations", type=int, default=200_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_timing)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # config handling needs the subparser that will actually consume the flags
        if argv and argv[0] in ("generate", "solve", "bounds", "netlib-prep", "timing"):
            subparser = parser._subparsers._group_actions[0].choices[argv[0]]
            argv = [argv[0]] + _apply_config(subparser, argv[1:])
        args = parser.parse_args(argv)
        if args.command == "solve" and args.solver is None:
            args.solver = ["motzkin"]
        if args.command == "timing" and args.solver is None:
            args.solver = ["motzkin", "rk-uniform"]
        return args.func(args)
    except SystemExit as exc:  # argparse reports its own errors on stderr
        return int(exc.code or 0)
    except (linalg.RankError, linalg.ConvergenceError, systems.DegenerateRowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
