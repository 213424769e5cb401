"""Closed-form 2-Wasserstein geometry for Gaussian measures.

Distances between univariate Gaussians reduce to squared Euclidean distance
in the (mean, std) plane; the multivariate case combines the mean gap with
the Bures metric on covariances. Barycenters of univariate Gaussians have a
closed form: the weighted average of the means and of the standard
deviations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

_SYMMETRY_TOL = 1e-10
_EIGENVALUE_TOL = 1e-8
_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class GaussianMeasure1D:
    """Univariate Gaussian by mean and standard deviation (std = 0 allowed)."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std < 0.0:
            raise ValueError("std must be nonnegative")


@dataclass(frozen=True)
class GaussianMeasureND:
    """Multivariate Gaussian by mean vector and PSD covariance matrix."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise ValueError("covariance shape must match the mean dimension")
        _validate_covariance(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class BarycenterWeights:
    """Nonnegative barycentric coordinates summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if weights.min() < 0.0:
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def equal(cls, n: int) -> BarycenterWeights:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def one_hot(cls, n: int, index: int) -> BarycenterWeights:
        weights = np.zeros(n)
        weights[index] = 1.0
        return cls(weights)

    def __len__(self) -> int:
        return self.weights.size


def _validate_covariance(cov: np.ndarray) -> None:
    if not np.allclose(cov, cov.T, rtol=0.0, atol=_SYMMETRY_TOL):
        raise ValueError("covariance matrix must be symmetric")
    if eigh(cov, eigvals_only=True).min() < -_EIGENVALUE_TOL:
        raise ValueError("covariance matrix must be positive semidefinite")


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    # Symmetric eigendecomposition; negative eigenvalues from rounding are
    # clamped to zero before the square root.
    eigenvalues, eigenvectors = eigh(mat)
    root = np.sqrt(np.maximum(eigenvalues, 0.0))
    return (eigenvectors * root) @ eigenvectors.T


def w2_squared_1d(a: GaussianMeasure1D, b: GaussianMeasure1D) -> float:
    """Squared 2-Wasserstein distance between univariate Gaussians.

    Equals (mean_a - mean_b)^2 + (std_a - std_b)^2: the squared Euclidean
    distance between the two measures seen as points in the (mean, std)
    plane. Well defined for degenerate (std = 0) operands.
    """
    return (a.mean - b.mean) ** 2 + (a.std - b.std) ** 2


def bures_squared(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Bures metric trace(A + B - 2 (A^1/2 B A^1/2)^1/2).

    Both inputs must be symmetric positive semidefinite; raises ValueError
    otherwise. The result is clamped below at zero. For commuting inputs it
    equals the squared Frobenius norm of A^1/2 - B^1/2.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("covariance matrices must have equal shape")
    _validate_covariance(a)
    _validate_covariance(b)
    root_a = _psd_sqrt(a)
    inner = root_a @ b @ root_a
    cross = _psd_sqrt(0.5 * (inner + inner.T))
    value = float(np.trace(a) + np.trace(b) - 2.0 * np.trace(cross))
    return max(value, 0.0)


def w2_squared_nd(a: GaussianMeasureND, b: GaussianMeasureND) -> float:
    """Squared 2-Wasserstein distance between multivariate Gaussians."""
    if a.dim != b.dim:
        raise ValueError("measures must have equal dimension")
    mean_gap = a.mean - b.mean
    return float(mean_gap @ mean_gap) + bures_squared(a.covariance, b.covariance)


def barycenter_1d(
    measures: Sequence[GaussianMeasure1D], w: BarycenterWeights
) -> GaussianMeasure1D:
    """Weighted 2-Wasserstein barycenter of univariate Gaussians.

    Minimizes sum_i w_i * w2_squared_1d(., measure_i) over Gaussians; the
    closed-form solution is the weighted mean of the means and of the
    standard deviations.
    """
    if len(measures) == 0:
        raise ValueError("need at least one measure")
    if len(measures) != len(w):
        raise ValueError("weight and measure counts must match")
    means = np.array([m.mean for m in measures])
    stds = np.array([m.std for m in measures])
    return GaussianMeasure1D(
        mean=float(w.weights @ means), std=float(w.weights @ stds)
    )
