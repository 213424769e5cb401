"""Sequential optimization drivers for both algorithms.

One run = n_init Latin-hypercube evaluations followed by n_iters sequential
queries. The vanilla driver re-estimates the kernel hyperparameters by MLE
every iteration; the barycenter-ensemble driver samples its hyperparameter
pairs once up front and only refits the members. Runs are fully determined
by their seed: the per-run seed spawns one child stream for the LHS design
and one for the ensemble draw, so both algorithms at the same seed share the
same initial observations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .acquisition import AcquisitionConfig, optimize_acquisition
from .ensemble import (
    build_pool,
    ensemble_predict,
    ensemble_total_predict,
    fit_ensemble,
    refit,
    sample_ensemble_hyperparams,
)
from .gp import Dataset, GPFitError, fit_gp_escalating, mle_fit
from .problems import TestProblem, rescaled_eval

ALG_GP_BO = "gpbo"
ALG_WBGP_BO = "wbgp"

# How the ensemble's exploration term is combined for the acquisition.
# "total" (the default) uses the mixture variance, whose member-disagreement
# term is what lets the ensemble escape regions a single misspecified GP
# exploits prematurely; it is the combination that reproduces the reported
# benchmark results. "barycenter" uses the averaged member stds, for which
# the ensemble LCB provably equals the average of the member LCBs.
UNCERTAINTY_TOTAL = "total"
UNCERTAINTY_BARYCENTER = "barycenter"


class BORunError(RuntimeError):
    """A run aborted on an unrecoverable GP fit failure."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    seed: int
    n_init: int = 5
    n_iters: int = 30
    n_members: int = 16  # ignored for gpbo
    ensemble_uncertainty: str = UNCERTAINTY_TOTAL  # ignored for gpbo
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)

    def __post_init__(self):
        if self.algorithm not in (ALG_GP_BO, ALG_WBGP_BO):
            raise ValueError(f"unknown algorithm: {self.algorithm!r}")
        if self.ensemble_uncertainty not in (UNCERTAINTY_TOTAL, UNCERTAINTY_BARYCENTER):
            raise ValueError(
                f"unknown ensemble uncertainty: {self.ensemble_uncertainty!r}"
            )
        if self.n_init < 1:
            raise ValueError("n_init must be at least 1")
        if self.n_iters < 0:
            raise ValueError("n_iters must be nonnegative")


@dataclass(frozen=True)
class RunTrace:
    """Per-evaluation record of one seeded run."""

    queries: np.ndarray
    values: np.ndarray
    best_so_far: np.ndarray
    wall_times: np.ndarray


def lhs_init(n: int, seed) -> np.ndarray:
    """Latin hypercube design on [0, 1]: one uniform draw per stratum.

    The n strata [i/n, (i+1)/n) each receive exactly one point; the points
    are returned in randomized order. Deterministic per seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    points = (np.arange(n) + rng.random(n)) / n
    return rng.permutation(points)


def _child_seeds(seed: int):
    # Fixed fan-out: child 0 drives the LHS design, child 1 the ensemble
    # draw. gpbo spawns both so the LHS stream matches wbgp at equal seed.
    return np.random.SeedSequence(seed).spawn(2)


def _drive(problem: TestProblem, cfg: RunConfig, init_points: np.ndarray,
           propose) -> RunTrace:
    queries: list[float] = []
    values: list[float] = []
    wall_times: list[float] = []
    for u in init_points:
        start = time.perf_counter()
        values.append(rescaled_eval(problem, float(u)))
        queries.append(float(u))
        wall_times.append(time.perf_counter() - start)
    for iteration in range(cfg.n_iters):
        start = time.perf_counter()
        data = Dataset(np.array(queries), np.array(values))
        try:
            x_next = propose(iteration, data)
        except GPFitError as exc:
            raise BORunError(iteration, str(exc)) from exc
        queries.append(x_next)
        values.append(rescaled_eval(problem, x_next))
        wall_times.append(time.perf_counter() - start)
    return RunTrace(
        queries=np.array(queries),
        values=np.array(values),
        best_so_far=np.minimum.accumulate(np.array(values)),
        wall_times=np.array(wall_times),
    )


def run_gp_bo(problem: TestProblem, cfg: RunConfig) -> RunTrace:
    """Vanilla GP-BO: MLE refit of the hyperparameters at every iteration."""
    if cfg.algorithm != ALG_GP_BO:
        raise ValueError("run_gp_bo requires an algorithm=gpbo config")
    lhs_seed, _ = _child_seeds(cfg.seed)
    init_points = lhs_init(cfg.n_init, lhs_seed)

    def propose(iteration: int, data: Dataset) -> float:
        hyperparams = mle_fit(data)
        surrogate = fit_gp_escalating(hyperparams, data)
        return optimize_acquisition(surrogate.predict, cfg.acquisition)

    return _drive(problem, cfg, init_points, propose)


def run_wbgp_bo(problem: TestProblem, cfg: RunConfig) -> RunTrace:
    """Ensemble BO: fixed hyperparameter pairs, ensemble LCB acquisition."""
    if cfg.algorithm != ALG_WBGP_BO:
        raise ValueError("run_wbgp_bo requires an algorithm=wbgp config")
    lhs_seed, ensemble_seed = _child_seeds(cfg.seed)
    init_points = lhs_init(cfg.n_init, lhs_seed)
    hyperparams = sample_ensemble_hyperparams(
        build_pool(), cfg.n_members, ensemble_seed
    )
    combine = (
        ensemble_total_predict
        if cfg.ensemble_uncertainty == UNCERTAINTY_TOTAL
        else ensemble_predict
    )

    state: dict = {"ensemble": None}

    def propose(iteration: int, data: Dataset) -> float:
        if state["ensemble"] is None:
            state["ensemble"] = fit_ensemble(hyperparams, data)
        else:
            state["ensemble"] = refit(state["ensemble"], data)
        e = state["ensemble"]
        return optimize_acquisition(
            lambda xs: combine(e, xs), cfg.acquisition
        )

    return _drive(problem, cfg, init_points, propose)


def run(problem: TestProblem, cfg: RunConfig) -> RunTrace:
    """Dispatch on cfg.algorithm."""
    if cfg.algorithm == ALG_GP_BO:
        return run_gp_bo(problem, cfg)
    return run_wbgp_bo(problem, cfg)
