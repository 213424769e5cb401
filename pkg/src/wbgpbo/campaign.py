"""Benchmark campaign runner and result emission.

Executes (problem x algorithm x run) cells, aggregates final best values
with paired Wilcoxon statistics against the vanilla baseline, and writes
delimited outputs: a summary table, the full per-step traces, and per-problem
convergence curves, optionally rendered as figures.

Every value that reaches a CSV is quantized to 6 decimals first and the
aggregates are computed from the quantized values, so statistics recomputed
from the emitted files match the summary exactly and reruns are
byte-identical regardless of worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionConfig
from .loop import ALG_GP_BO, ALG_WBGP_BO, BORunError, RunConfig, RunTrace, run
from .problems import TestProblem, get_problem, problem_suite, verify_suite
from .stats import wilcoxon_paired

logger = logging.getLogger(__name__)

BASELINE = "gpbo"
ALGORITHM_ORDER = ("gpbo", "wbgp16", "wbgp32")
ALGORITHM_LABELS = {
    "gpbo": "GP-BO",
    "wbgp16": "WBGP-BO-N16",
    "wbgp32": "WBGP-BO-N32",
}
_ALGORITHM_SPECS = {
    "gpbo": (ALG_GP_BO, 0),
    "wbgp16": (ALG_WBGP_BO, 16),
    "wbgp32": (ALG_WBGP_BO, 32),
}

MIN_PAIRS_FOR_TEST = 6


def quantize(value: float) -> float:
    """Round to the 6-decimal precision used in every emitted file."""
    return float(f"{value:.6f}")


@dataclass(frozen=True)
class CellResult:
    """Aggregate over the runs of one (problem, algorithm) cell."""

    problem: str
    algorithm: str
    finals: tuple[float, ...]  # quantized final best per successful run
    mean: float
    std: float
    p_value: float | None  # vs. the baseline; None when not applicable
    p_degenerate: bool
    n_runs_requested: int
    failures: tuple[str, ...]

    @property
    def complete(self) -> bool:
        return len(self.finals) == self.n_runs_requested


@dataclass(frozen=True)
class CampaignResult:
    cells: dict[tuple[str, str], CellResult]
    traces: dict[tuple[str, str, int], RunTrace]
    problems: tuple[str, ...]
    algorithms: tuple[str, ...]
    n_runs: int
    n_iters: int
    n_init: int
    xi: float
    master_seed: int
    wall_time: float

    @property
    def complete(self) -> bool:
        return all(cell.complete for cell in self.cells.values())


def run_seed(master_seed: int, problem: str, run_index: int) -> int:
    """Per-run seed, identical across algorithms so they share the LHS design."""
    number = int(problem.removeprefix("problem"))
    ss = np.random.SeedSequence([master_seed, number, run_index])
    return int(ss.generate_state(1)[0])


def _execute_task(task):
    problem_name, algorithm, run_index, seed, n_iters, n_init, xi = task
    problem = get_problem(problem_name)
    kind, n_members = _ALGORITHM_SPECS[algorithm]
    cfg = RunConfig(
        algorithm=kind,
        seed=seed,
        n_init=n_init,
        n_iters=n_iters,
        n_members=n_members or 16,
        acquisition=AcquisitionConfig(xi=xi),
    )
    try:
        trace = run(problem, cfg)
        return problem_name, algorithm, run_index, trace, None
    except BORunError as exc:
        return problem_name, algorithm, run_index, None, str(exc)


def run_campaign(
    problems=None,
    algorithms=None,
    n_runs: int = 30,
    master_seed: int = 42,
    n_iters: int = 30,
    n_init: int = 5,
    xi: float = 2.0,
    jobs: int = 1,
) -> CampaignResult:
    """Run every (problem, algorithm, run) cell and aggregate the results.

    Individual run failures are recorded on their cell and the campaign
    continues. Cells with fewer successes than requested runs are flagged
    via CellResult.complete.
    """
    verify_suite()
    if problems is None:
        problem_objs = problem_suite()
    else:
        problem_objs = [get_problem(name) for name in problems]
    problem_names = tuple(p.name for p in problem_objs)
    if algorithms is None:
        algorithms = ALGORITHM_ORDER
    algorithms = tuple(a for a in ALGORITHM_ORDER if a in set(algorithms))
    if not algorithms:
        raise ValueError("no known algorithms selected")

    tasks = [
        (name, algorithm, run_index,
         run_seed(master_seed, name, run_index), n_iters, n_init, xi)
        for name in problem_names
        for algorithm in algorithms
        for run_index in range(n_runs)
    ]

    start = time.perf_counter()
    if jobs <= 1:
        outcomes = [_execute_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute_task, tasks, chunksize=1))
    wall_time = time.perf_counter() - start

    traces: dict[tuple[str, str, int], RunTrace] = {}
    errors: dict[tuple[str, str], list[str]] = {}
    for problem_name, algorithm, run_index, trace, error in outcomes:
        if trace is not None:
            traces[(problem_name, algorithm, run_index)] = trace
        else:
            message = f"run {run_index}: {error}"
            errors.setdefault((problem_name, algorithm), []).append(message)
            logger.error("%s/%s %s", problem_name, algorithm, message)

    cells: dict[tuple[str, str], CellResult] = {}
    for name in problem_names:
        baseline_finals = _finals_by_run(traces, name, BASELINE, n_runs)
        for algorithm in algorithms:
            finals_by_run = _finals_by_run(traces, name, algorithm, n_runs)
            finals = tuple(v for v in finals_by_run if v is not None)
            mean = float(np.mean(finals)) if finals else float("nan")
            std = float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0
            p_value, degenerate = _baseline_p_value(
                baseline_finals, finals_by_run, algorithm
            )
            cells[(name, algorithm)] = CellResult(
                problem=name,
                algorithm=algorithm,
                finals=finals,
                mean=mean,
                std=std,
                p_value=p_value,
                p_degenerate=degenerate,
                n_runs_requested=n_runs,
                failures=tuple(errors.get((name, algorithm), ())),
            )

    return CampaignResult(
        cells=cells,
        traces=traces,
        problems=problem_names,
        algorithms=algorithms,
        n_runs=n_runs,
        n_iters=n_iters,
        n_init=n_init,
        xi=xi,
        master_seed=master_seed,
        wall_time=wall_time,
    )


def _finals_by_run(traces, problem: str, algorithm: str, n_runs: int):
    finals = []
    for run_index in range(n_runs):
        trace = traces.get((problem, algorithm, run_index))
        finals.append(
            quantize(float(trace.best_so_far[-1])) if trace is not None else None
        )
    return finals


def _baseline_p_value(baseline_finals, finals_by_run, algorithm: str):
    if algorithm == BASELINE:
        return None, False
    pairs = [
        (x, y)
        for x, y in zip(baseline_finals, finals_by_run)
        if x is not None and y is not None
    ]
    if len(pairs) < MIN_PAIRS_FOR_TEST:
        return None, False
    result = wilcoxon_paired([x for x, _ in pairs], [y for _, y in pairs])
    if result.degenerate:
        return None, True
    return result.p_value, False


def emit_results(
    result: CampaignResult, out_dir, render_figures: bool = True
) -> list[Path]:
    """Write summary.csv, traces.csv, convergence tables, and figures.

    Returns the list of written paths. Convergence tables hold the per-step
    mean and standard deviation of the best-so-far value across runs; the
    figures render those same tables, one per problem.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        _write_summary(result, out / "summary.csv"),
        _write_traces(result, out / "traces.csv"),
    ]
    convergence = _convergence_tables(result)
    conv_dir = out / "convergence"
    conv_dir.mkdir(exist_ok=True)
    for problem in result.problems:
        written.append(
            _write_convergence(convergence[problem], conv_dir / f"{problem}.csv")
        )
    written.append(_write_readme(out / "README.md"))
    if render_figures:
        from .figures import render_convergence_figure

        fig_dir = out / "figures"
        fig_dir.mkdir(exist_ok=True)
        for problem in result.problems:
            written.append(
                render_convergence_figure(
                    problem, convergence[problem], fig_dir / f"{problem}.png"
                )
            )
    return written


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _fmt_p(p_value: float | None) -> str:
    return "NA" if p_value is None else _fmt(p_value)


def _write_summary(result: CampaignResult, path: Path) -> Path:
    lines = ["problem,algorithm,mean,std,p_value"]
    for problem in result.problems:
        for algorithm in result.algorithms:
            cell = result.cells[(problem, algorithm)]
            lines.append(
                f"{problem},{ALGORITHM_LABELS[algorithm]},"
                f"{_fmt(cell.mean)},{_fmt(cell.std)},{_fmt_p(cell.p_value)}"
            )
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def _write_traces(result: CampaignResult, path: Path) -> Path:
    lines = ["problem,algorithm,run,step,query,value,best_so_far"]
    for problem in result.problems:
        for algorithm in result.algorithms:
            for run_index in range(result.n_runs):
                trace = result.traces.get((problem, algorithm, run_index))
                if trace is None:
                    continue
                label = ALGORITHM_LABELS[algorithm]
                for step in range(trace.queries.size):
                    lines.append(
                        f"{problem},{label},{run_index},{step},"
                        f"{_fmt(trace.queries[step])},{_fmt(trace.values[step])},"
                        f"{_fmt(trace.best_so_far[step])}"
                    )
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def _convergence_tables(result: CampaignResult):
    """Per problem: {algorithm: (mean_best, std_best)} arrays over steps."""
    tables: dict[str, dict[str, tuple[np.ndarray, np.ndarray]]] = {}
    for problem in result.problems:
        per_algorithm = {}
        for algorithm in result.algorithms:
            curves = [
                np.array([quantize(v) for v in trace.best_so_far])
                for (p, a, _), trace in sorted(result.traces.items())
                if p == problem and a == algorithm
            ]
            if not curves:
                continue
            stacked = np.vstack(curves)
            mean = stacked.mean(axis=0)
            std = (
                stacked.std(axis=0, ddof=1)
                if stacked.shape[0] > 1
                else np.zeros(stacked.shape[1])
            )
            per_algorithm[algorithm] = (mean, std)
        tables[problem] = per_algorithm
    return tables


def _write_convergence(per_algorithm, path: Path) -> Path:
    lines = ["algorithm,step,mean_best,std_best"]
    for algorithm in ALGORITHM_ORDER:
        if algorithm not in per_algorithm:
            continue
        mean, std = per_algorithm[algorithm]
        label = ALGORITHM_LABELS[algorithm]
        for step in range(mean.size):
            lines.append(f"{label},{step},{_fmt(mean[step])},{_fmt(std[step])}")
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


_OUTPUT_README = """\
# Campaign output files

All numeric columns are fixed-point with 6 decimals. `step` counts objective
evaluations from 0 (the initial design points come first). `p_value` is NA
for the baseline row and whenever the paired test is not applicable
(missing baseline, fewer than 6 pairs, or all paired differences zero).

- `summary.csv`: one row per (problem, algorithm) with the mean and standard
  deviation of the final best observed value across runs, and the two-sided
  paired Wilcoxon p-value against GP-BO.
- `traces.csv`: one row per (problem, algorithm, run, step) with the query
  location in [0, 1], the observed objective value, and the running minimum.
- `convergence/<problem>.csv`: per algorithm and step, the mean and standard
  deviation across runs of the best value observed so far.
- `figures/<problem>.png`: rendering of the convergence table (mean curve
  with a +/- one standard deviation band), when figure output is enabled.
"""


def _write_readme(path: Path) -> Path:
    path.write_text(_OUTPUT_README, newline="\n")
    return path
