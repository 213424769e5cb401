"""LCB acquisition and its deterministic global minimization on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gp import PosteriorGaussian

# Vectorized posterior: maps an array of points to (means, stds).
Surrogate = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AcquisitionConfig:
    """Exploration weight and resolution of the acquisition minimizer."""

    xi: float = 2.0
    grid_size: int = 1001
    refine_iters: int = 40

    def __post_init__(self):
        if not self.xi > 0.0:
            raise ValueError("xi must be positive")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be nonnegative")


def lcb(p: PosteriorGaussian, xi: float) -> float:
    """Lower confidence bound mean - xi * std."""
    if not xi > 0.0:
        raise ValueError("xi must be positive")
    return p.mean - xi * p.std


def optimize_acquisition(
    surrogate: Surrogate, cfg: AcquisitionConfig, seed=None
) -> float:
    """Global LCB minimizer over [0, 1].

    Evaluates the LCB on a uniform grid, then runs golden-section refinement
    inside the interval bracketing the best grid point. Grid ties break
    toward the smallest x, and the refinement only replaces the incumbent on
    a strict improvement, so the result never exceeds the grid minimum. The
    procedure is deterministic; seed is accepted for call-site uniformity.
    """
    grid = np.linspace(0.0, 1.0, cfg.grid_size)
    mean, std = surrogate(grid)
    values = mean - cfg.xi * std
    i = int(np.argmin(values))  # first occurrence: ties go to the smallest x
    best_x = float(grid[i])
    best_val = float(values[i])

    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, cfg.grid_size - 1)])
    for _ in range(cfg.refine_iters):
        c = b - _INV_PHI * (b - a)
        e = a + _INV_PHI * (b - a)
        mean, std = surrogate(np.array([c, e]))
        val_c, val_e = mean - cfg.xi * std
        for x, v in ((c, float(val_c)), (e, float(val_e))):
            if v < best_val:
                best_x, best_val = x, v
        if val_c < val_e:
            b = e
        else:
            a = c
    return min(max(best_x, 0.0), 1.0)
