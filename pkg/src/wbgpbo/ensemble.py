"""Wasserstein-barycenter ensemble of fixed-hyperparameter GPs.

N squared-exponential GPs with distinct hyperparameter pairs, all fitted to
the same dataset, are combined pointwise into a single surrogate whose
posterior is the 1D Wasserstein barycenter of the member posteriors. With
equal weights this is the average of the member means and the average of the
member standard deviations, so the ensemble LCB equals the average of the
member LCBs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gp import (
    DEFAULT_HYPERPARAM_BOUNDS,
    DEFAULT_JITTER,
    Dataset,
    FittedGP,
    GPFitError,
    KernelHyperparams,
    PosteriorGaussian,
    fit_gp_escalating,
)
from .wasserstein import BarycenterWeights, GaussianMeasure1D, barycenter_1d

logger = logging.getLogger(__name__)

POOL_GRID_SHAPE = (8, 8)


@dataclass(frozen=True)
class HyperparamPool:
    """The 64 predefined (signal_variance, length_scale) pairs."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        expected = POOL_GRID_SHAPE[0] * POOL_GRID_SHAPE[1]
        if len(self.pairs) != expected:
            raise ValueError(f"pool must contain exactly {expected} pairs")
        (lo_sf2, hi_sf2), (lo_ell, hi_ell) = DEFAULT_HYPERPARAM_BOUNDS
        for sf2, ell in self.pairs:
            if not (lo_sf2 <= sf2 <= hi_sf2 and lo_ell <= ell <= hi_ell):
                raise ValueError("pool pair outside the hyperparameter box")

    def __len__(self) -> int:
        return len(self.pairs)


def build_pool() -> HyperparamPool:
    """Uniform 8x8 grid over the hyperparameter box, crossed in row-major order."""
    axes = [
        np.linspace(lo, hi, count)
        for (lo, hi), count in zip(DEFAULT_HYPERPARAM_BOUNDS, POOL_GRID_SHAPE)
    ]
    pairs = tuple(
        (float(sf2), float(ell)) for sf2 in axes[0] for ell in axes[1]
    )
    return HyperparamPool(pairs=pairs)


def sample_ensemble_hyperparams(
    pool: HyperparamPool,
    n: int,
    seed: int | np.random.SeedSequence | np.random.Generator,
    jitter: float = DEFAULT_JITTER,
) -> list[KernelHyperparams]:
    """Draw n distinct pairs from the pool, uniformly without replacement."""
    if n > len(pool):
        raise ValueError(f"cannot draw {n} distinct pairs from a pool of {len(pool)}")
    rng = np.random.default_rng(seed)
    indices = rng.choice(len(pool), size=n, replace=False)
    return [
        KernelHyperparams(pool.pairs[i][0], pool.pairs[i][1], jitter)
        for i in indices
    ]


@dataclass(frozen=True)
class GPEnsemble:
    """N fitted GPs sharing one dataset, plus barycentric weights."""

    members: tuple[FittedGP, ...]
    weights: BarycenterWeights

    def __post_init__(self):
        if len(self.members) == 0:
            raise ValueError("ensemble must have at least one member")
        if len(self.members) != len(self.weights):
            raise ValueError("weights must match the member count")
        first = self.members[0].data
        for member in self.members[1:]:
            if not (
                np.array_equal(member.data.locations, first.locations)
                and np.array_equal(member.data.values, first.values)
            ):
                raise ValueError("ensemble members must share one dataset")

    @property
    def n_members(self) -> int:
        return len(self.members)


def fit_ensemble(
    hyperparams: Sequence[KernelHyperparams],
    d: Dataset,
    weights: BarycenterWeights | None = None,
) -> GPEnsemble:
    """Fit one GP per hyperparameter pair to the shared dataset.

    A member whose fit fails even after jitter escalation is dropped and the
    remaining weights are renormalized; the drop is logged as a warning. All
    members failing is an error.
    """
    if weights is None:
        weights = BarycenterWeights.equal(len(hyperparams))
    if len(weights) != len(hyperparams):
        raise ValueError("weights must match the hyperparameter count")
    members: list[FittedGP] = []
    kept = []
    for i, h in enumerate(hyperparams):
        try:
            members.append(fit_gp_escalating(h, d))
            kept.append(i)
        except GPFitError as exc:
            logger.warning(
                "dropping ensemble member %d (signal_variance=%g, length_scale=%g): %s",
                i,
                h.signal_variance,
                h.length_scale,
                exc,
            )
    if not members:
        raise GPFitError("every ensemble member failed to fit")
    kept_weights = weights.weights[kept]
    total = kept_weights.sum()
    if total <= 0.0:
        raise GPFitError("all surviving ensemble members carry zero weight")
    if len(kept) < len(hyperparams):
        kept_weights = kept_weights / total
    return GPEnsemble(members=tuple(members), weights=BarycenterWeights(kept_weights))


def refit(e: GPEnsemble, d: Dataset) -> GPEnsemble:
    """Refit every member to d; hyperparameters are never re-tuned."""
    return fit_ensemble([m.hyperparams for m in e.members], d, e.weights)


def _member_stats(e: GPEnsemble, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    member_means = np.empty((e.n_members, xs.size))
    member_stds = np.empty((e.n_members, xs.size))
    for i, member in enumerate(e.members):
        member_means[i], member_stds[i] = member.predict(xs)
    return member_means, member_stds


def ensemble_predict(e: GPEnsemble, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Barycenter mean and std at each point of xs (vectorized)."""
    member_means, member_stds = _member_stats(e, xs)
    w = e.weights.weights
    return w @ member_means, w @ member_stds


def ensemble_total_predict(
    e: GPEnsemble, xs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and total std: within-member variance plus member disagreement.

    The variance is the law-of-total-variance combination
    sum_i w_i * (std_i^2 + mean_i^2) - mean^2, i.e. the variance of the
    mixture of the member posteriors. Unlike the barycenter std (the plain
    average of member stds), it grows where the members disagree about the
    mean, which is the ensemble's strongest signal of an unexplored region.
    """
    member_means, member_stds = _member_stats(e, xs)
    w = e.weights.weights
    mean = w @ member_means
    second_moment = w @ (member_stds**2 + member_means**2)
    variance = np.maximum(second_moment - mean**2, 0.0)
    return mean, np.sqrt(variance)


def barycenter_posterior(e: GPEnsemble, x: float) -> PosteriorGaussian:
    """Wasserstein barycenter of the member posteriors at a single point."""
    measures = []
    for member in e.members:
        mean, std = member.predict(np.array([x]))
        measures.append(GaussianMeasure1D(mean=float(mean[0]), std=float(std[0])))
    combined = barycenter_1d(measures, e.weights)
    return PosteriorGaussian(mean=combined.mean, std=combined.std)


def ensemble_lcb(e: GPEnsemble, x: float, xi: float) -> float:
    """LCB of the barycenter posterior: mean - xi * std."""
    if not xi > 0.0:
        raise ValueError("xi must be positive")
    mean, std = ensemble_predict(e, np.array([x]))
    return float(mean[0] - xi * std[0])
