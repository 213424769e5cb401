"""Squared-exponential Gaussian process regression on the unit interval.

Cholesky-based fitting, posterior prediction, log marginal likelihood, and a
deterministic derivative-free MLE (coarse grid plus coordinate-wise
golden-section refinement) for the kernel hyperparameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

# Nugget added to the Gram diagonal; problems here are noise-free, the jitter
# exists purely to keep the factorization well conditioned.
DEFAULT_JITTER = 1e-6
MAX_JITTER = 1e-2

# Box for (signal_variance, length_scale), shared with the ensemble pool so
# both algorithms search the same hyperparameter space.
DEFAULT_HYPERPARAM_BOUNDS = ((0.01, 0.5), (0.01, 0.5))

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class GPFitError(RuntimeError):
    """Raised when the Gram matrix cannot be factorized (ill-conditioning)."""


@dataclass(frozen=True)
class Dataset:
    """Query locations in the rescaled search space [0, 1] and their values."""

    locations: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        locations = np.asarray(self.locations, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if locations.ndim != 1 or values.ndim != 1:
            raise ValueError("locations and values must be one-dimensional")
        if locations.shape != values.shape:
            raise ValueError("locations and values must have equal length")
        if locations.size and (locations.min() < 0.0 or locations.max() > 1.0):
            raise ValueError("locations must lie in [0, 1]")
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.locations.size

    def append(self, x: float, y: float) -> Dataset:
        return Dataset(np.append(self.locations, x), np.append(self.values, y))


@dataclass(frozen=True)
class KernelHyperparams:
    """SE-kernel signal variance, length scale, and diagonal jitter."""

    signal_variance: float
    length_scale: float
    jitter: float = DEFAULT_JITTER

    def __post_init__(self):
        if not self.signal_variance > 0.0:
            raise ValueError("signal_variance must be positive")
        if not self.length_scale > 0.0:
            raise ValueError("length_scale must be positive")
        if self.jitter < 0.0:
            raise ValueError("jitter must be nonnegative")


@dataclass(frozen=True)
class PosteriorGaussian:
    """Pointwise posterior of the latent objective value."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std < 0.0:
            raise ValueError("std must be nonnegative")


def kernel_eval(h: KernelHyperparams, x: float, x2: float) -> float:
    """SE kernel k(x, x') = signal_variance * exp(-(x - x')^2 / (2 ell^2))."""
    diff = x - x2
    return h.signal_variance * math.exp(-diff * diff / (2.0 * h.length_scale**2))


def kernel_matrix(h: KernelHyperparams, xs: np.ndarray, xs2: np.ndarray) -> np.ndarray:
    """Cross-covariance matrix of shape (len(xs), len(xs2))."""
    diff = np.subtract.outer(np.asarray(xs, dtype=float), np.asarray(xs2, dtype=float))
    return h.signal_variance * np.exp(-(diff * diff) / (2.0 * h.length_scale**2))


@dataclass(frozen=True)
class FittedGP:
    """GP conditioned on a dataset.

    Stores the lower Cholesky factor of (K + jitter*I) and the precomputed
    solve alpha = (K + jitter*I)^-1 y, so prediction is two triangular solves.
    The prior mean is identically zero.
    """

    hyperparams: KernelHyperparams
    data: Dataset
    chol_factor: np.ndarray
    alpha: np.ndarray

    def predict(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and std at each point of xs (vectorized)."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        k_star = kernel_matrix(self.hyperparams, xs, self.data.locations)
        mean = k_star @ self.alpha
        v = solve_triangular(self.chol_factor, k_star.T, lower=True, check_finite=False)
        var = self.hyperparams.signal_variance - np.einsum("ij,ij->j", v, v)
        std = np.sqrt(np.maximum(var, 0.0))
        return mean, std


def fit_gp(h: KernelHyperparams, d: Dataset) -> FittedGP:
    """Factorize K + jitter*I and precompute the solve against the values.

    Raises GPFitError when the matrix is not positive definite; callers that
    must survive pathological hyperparameters should use fit_gp_escalating.
    """
    if len(d) == 0:
        raise ValueError("cannot fit a GP to an empty dataset")
    gram = kernel_matrix(h, d.locations, d.locations)
    gram[np.diag_indices_from(gram)] += h.jitter
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise GPFitError(
            f"Gram matrix not positive definite (n={len(d)}, "
            f"signal_variance={h.signal_variance:g}, length_scale={h.length_scale:g}, "
            f"jitter={h.jitter:g})"
        ) from exc
    alpha = solve_triangular(
        chol.T,
        solve_triangular(chol, d.values, lower=True, check_finite=False),
        lower=False,
        check_finite=False,
    )
    return FittedGP(hyperparams=h, data=d, chol_factor=chol, alpha=alpha)


def fit_gp_escalating(h: KernelHyperparams, d: Dataset) -> FittedGP:
    """fit_gp, escalating the jitter x10 up to MAX_JITTER on factorization failure."""
    jitter = h.jitter
    while True:
        try:
            return fit_gp(
                KernelHyperparams(h.signal_variance, h.length_scale, jitter), d
            )
        except GPFitError:
            if jitter >= MAX_JITTER:
                raise
            jitter = min(max(jitter, DEFAULT_JITTER) * 10.0, MAX_JITTER)


def posterior(g: FittedGP, x: float) -> PosteriorGaussian:
    """Posterior at a single point, variance clamped at zero before the sqrt."""
    mean, std = g.predict(np.array([x]))
    return PosteriorGaussian(mean=float(mean[0]), std=float(std[0]))


def log_marginal_likelihood(g: FittedGP) -> float:
    """log p(y | X, hyperparams) under the zero-mean GP prior."""
    n = len(g.data)
    fit_term = -0.5 * float(g.data.values @ g.alpha)
    logdet_term = -float(np.sum(np.log(np.diag(g.chol_factor))))
    return fit_term + logdet_term - 0.5 * n * math.log(2.0 * math.pi)


def _grid_axes(
    bounds: tuple[tuple[float, float], tuple[float, float]], shape: tuple[int, int]
) -> list[np.ndarray]:
    return [np.linspace(lo, hi, count) for (lo, hi), count in zip(bounds, shape)]


def mle_fit(
    d: Dataset,
    bounds: tuple[tuple[float, float], tuple[float, float]] = DEFAULT_HYPERPARAM_BOUNDS,
    jitter: float = DEFAULT_JITTER,
    grid_shape: tuple[int, int] = (8, 8),
    refine_iters: int = 50,
) -> KernelHyperparams:
    """Maximize the log marginal likelihood over the hyperparameter box.

    Deterministic two-stage search: evaluate the likelihood on a uniform grid
    over the box, then refine around the best cell with coordinate-wise
    golden-section steps in log-space. Candidates whose Gram matrix fails to
    factorize are skipped; if every grid candidate fails, the jitter is
    escalated x10 and the search retried once.
    """
    if len(d) == 0:
        raise ValueError("cannot run MLE on an empty dataset")
    jitters = [jitter]
    if jitter < MAX_JITTER:
        jitters.append(min(max(jitter, DEFAULT_JITTER) * 10.0, MAX_JITTER))
    for attempt in jitters:
        found = _mle_search(d, bounds, attempt, grid_shape, refine_iters)
        if found is not None:
            return found
    raise GPFitError(
        "MLE failed: no hyperparameter candidate produced a positive-definite "
        f"Gram matrix (n={len(d)}, jitter escalated to {jitters[-1]:g})"
    )


def _mle_search(d, bounds, jitter, grid_shape, refine_iters):
    def lml(sf2: float, ell: float) -> float:
        try:
            return log_marginal_likelihood(
                fit_gp(KernelHyperparams(sf2, ell, jitter), d)
            )
        except GPFitError:
            return -math.inf

    axes = _grid_axes(bounds, grid_shape)
    grid_vals = np.array([[lml(sf2, ell) for ell in axes[1]] for sf2 in axes[0]])
    if not np.isfinite(grid_vals).any():
        return None
    i, j = np.unravel_index(np.argmax(grid_vals), grid_vals.shape)

    best_point = [axes[0][i], axes[1][j]]
    best_val = grid_vals[i, j]
    current = list(best_point)
    # Per-coordinate log-space brackets spanning the neighboring grid cells.
    brackets = [
        [
            math.log(axes[0][max(i - 1, 0)]),
            math.log(axes[0][min(i + 1, len(axes[0]) - 1)]),
        ],
        [
            math.log(axes[1][max(j - 1, 0)]),
            math.log(axes[1][min(j + 1, len(axes[1]) - 1)]),
        ],
    ]
    for step in range(refine_iters):
        k = step % 2
        a, b = brackets[k]
        c = b - _INV_PHI * (b - a)
        e = a + _INV_PHI * (b - a)

        def at(log_coord: float) -> float:
            point = list(current)
            point[k] = math.exp(log_coord)
            return lml(point[0], point[1])

        val_c, val_e = at(c), at(e)
        if val_c >= val_e:
            brackets[k] = [a, e]
            current[k] = math.exp(c)
            step_val = val_c
        else:
            brackets[k] = [c, b]
            current[k] = math.exp(e)
            step_val = val_e
        if step_val > best_val:
            best_val = step_val
            best_point = list(current)
    return KernelHyperparams(best_point[0], best_point[1], jitter)
