"""Command-line interface: `run` a benchmark campaign, or `selfcheck`."""

from __future__ import annotations

import argparse
import logging
import sys

from .campaign import (
    ALGORITHM_LABELS,
    ALGORITHM_ORDER,
    emit_results,
    run_campaign,
)
from .problems import problem_suite
from .selfcheck import run_all


def _parse_problems(spec: str) -> list[str] | None:
    if spec.strip().lower() == "all":
        return None
    return [token for token in spec.split(",") if token.strip()]


def _parse_algorithms(spec: str) -> list[str] | None:
    if spec.strip().lower() == "all":
        return None
    algorithms = [token.strip().lower() for token in spec.split(",") if token.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHM_ORDER]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown algorithms: {', '.join(unknown)} "
            f"(choose from {', '.join(ALGORITHM_ORDER)})"
        )
    return algorithms


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbgpbo",
        description=(
            "Benchmark harness comparing vanilla GP-BO against BO with a "
            "Wasserstein-barycenter GP ensemble surrogate."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a benchmark campaign")
    run_p.add_argument(
        "--problems",
        default="all",
        type=_parse_problems,
        help="comma-separated problem names or numbers (e.g. 02,14), or 'all'",
    )
    run_p.add_argument(
        "--algorithms",
        default="all",
        type=_parse_algorithms,
        help=f"comma list from {{{','.join(ALGORITHM_ORDER)}}}, or 'all'",
    )
    run_p.add_argument("--runs", type=int, default=30, help="runs per cell")
    run_p.add_argument("--iters", type=int, default=30, help="sequential iterations")
    run_p.add_argument("--init", type=int, default=5, help="initial LHS points")
    run_p.add_argument("--xi", type=float, default=2.0, help="LCB exploration weight")
    run_p.add_argument("--seed", type=int, default=42, help="master seed")
    run_p.add_argument("--out", default="results", help="output directory")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    run_p.add_argument(
        "--no-figures",
        action="store_true",
        help="skip rendering convergence figures",
    )

    sub.add_parser("selfcheck", help="run the property-check suite")
    return parser


def _cmd_run(args) -> int:
    result = run_campaign(
        problems=args.problems,
        algorithms=args.algorithms,
        n_runs=args.runs,
        master_seed=args.seed,
        n_iters=args.iters,
        n_init=args.init,
        xi=args.xi,
        jobs=args.jobs,
    )
    written = emit_results(result, args.out, render_figures=not args.no_figures)

    print(f"campaign finished in {result.wall_time:.1f}s "
          f"({len(result.problems)} problems x {len(result.algorithms)} algorithms "
          f"x {result.n_runs} runs)")
    header = f"{'problem':<12}" + "".join(
        f"{ALGORITHM_LABELS[a]:>24}" for a in result.algorithms
    )
    print(header)
    for problem in result.problems:
        row = f"{problem:<12}"
        for algorithm in result.algorithms:
            cell = result.cells[(problem, algorithm)]
            row += f"{cell.mean:>15.4f} ({cell.std:.4f})"
        print(row)
    for path in written:
        print(f"wrote {path}")

    incomplete = [
        cell for cell in result.cells.values() if not cell.complete
    ]
    if incomplete:
        for cell in incomplete:
            print(
                f"WARNING: {cell.problem}/{cell.algorithm} completed only "
                f"{len(cell.finals)}/{cell.n_runs_requested} runs:",
                file=sys.stderr,
            )
            for failure in cell.failures:
                print(f"  {failure}", file=sys.stderr)
        return 1
    return 0


def _cmd_selfcheck(args) -> int:
    failures = run_all(verbose=True)
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    print("all checks passed")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_selfcheck(args)


if __name__ == "__main__":
    sys.exit(main())
