"""Command line entry point: ``romc run``, ``romc abc`` and ``romc timing``.

Exit codes: 0 on success, 2 on a configuration error, 3 when inference
is degenerate (no solution accepted, or no sample kept).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .benchmarks import EXAMPLES
from .errors import BudgetExceededError, DegeneratePosteriorError, InvalidArgumentError
from .runner import PHASES, RunConfig, run_inference, run_rejection_abc, run_timing

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3


def _eps(text: str):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="romc", description="Robust optimisation Monte Carlo on a named example.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, choices=sorted(EXAMPLES))
    common.add_argument("--eps", type=_eps, default="auto", help="threshold, or 'auto' for a quantile of d*")
    common.add_argument("--seed", type=int, default=21)
    common.add_argument("--parallel", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    romc_args = argparse.ArgumentParser(add_help=False)
    romc_args.add_argument("--n1", type=int, default=500)
    romc_args.add_argument("--n2", type=int, default=50)
    romc_args.add_argument("--quantile", type=float, default=0.9)
    romc_args.add_argument("--use-bo", action="store_true")
    romc_args.add_argument("--fit-models", action="store_true")
    romc_args.add_argument("--grid-step", type=float, default=0.05)

    sub.add_parser("run", parents=[common, romc_args], help="train and sample the ROMC posterior")
    sub.add_parser("timing", parents=[common, romc_args], help="per-phase wall-clock, sequential vs parallel")
    abc = sub.add_parser("abc", parents=[common], help="rejection ABC reference sampler")
    abc.add_argument("--n-accept", type=int, default=10_000)
    abc.add_argument("--max-trials", type=int, default=10_000_000)
    return parser


def _config(args) -> RunConfig:
    kw = dict(model_name=args.model, eps=args.eps, seed=args.seed, parallel=args.parallel,
              workers=args.workers, output_dir=args.out)
    if args.command == "abc":
        kw.update(n_accept=args.n_accept, max_trials=args.max_trials)
    else:
        kw.update(n1=args.n1, n2=args.n2, quantile=args.quantile, use_bo=args.use_bo,
                  fit_models=args.fit_models, grid_step=args.grid_step)
    return RunConfig(**kw)


def _print_summary(report) -> None:
    s = report.summary
    print(f"accepted: {report.accepted}  eps: {report.eps:.6g}")
    print(f"samples kept: {s['n_kept']}  rejected: {s['n_rejected']}  ESS: {s['ess']:.1f}")
    print("mean: " + " ".join(f"{m:.4f}" for m in s["mean"]))
    print("std:  " + " ".join(f"{m:.4f}" for m in s["std"]))
    if "acceptance_rate" in s:
        print(f"acceptance rate: {s['acceptance_rate']:.5f}")
    if report.divergence is not None:
        print(f"Jensen-Shannon divergence: {report.divergence:.5f}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = _config(args)
        if args.command == "run":
            _print_summary(run_inference(config))
        elif args.command == "abc":
            _print_summary(run_rejection_abc(config))
        else:
            for row in run_timing(config, PHASES):
                print(f"{row['phase']:<15} seq {row['sequential_s']:.3f}s  "
                      f"par {row['parallel_s']:.3f}s  x{row['speedup']:.2f}")
    except InvalidArgumentError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneratePosteriorError as exc:
        print(f"degenerate inference: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BudgetExceededError as exc:
        print(f"degenerate inference: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
