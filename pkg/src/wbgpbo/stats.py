"""Paired Wilcoxon signed-rank test.

Exact permutation distribution (supporting tied ranks) for small samples,
normal approximation with continuity and tie corrections for larger ones.
Zero differences are dropped before ranking, the common convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

EXACT_MAX_N = 25


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    statistic: float  # W+: rank sum of the positive differences
    n_effective: int  # pairs remaining after dropping zero differences
    degenerate: bool  # every difference was zero; p_value forced to 1


def _exact_p_value(ranks: np.ndarray, w_plus: float) -> float:
    # Average ranks are multiples of 1/2; doubling gives an integer lattice,
    # over which the 2^n sign assignments are counted by polynomial
    # multiplication.
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    counts = np.zeros(int(doubled.sum()) + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.size - r]
        counts += shifted
    w = int(round(2.0 * w_plus))
    n_patterns = 2 ** len(ranks)
    p_low = float(np.sum(counts[: w + 1])) / n_patterns
    p_high = float(np.sum(counts[w:])) / n_patterns
    return min(1.0, 2.0 * min(p_low, p_high))


def _approx_p_value(ranks: np.ndarray, w_plus: float) -> float:
    n = ranks.size
    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    # Tie correction: each group of t tied absolute differences removes
    # (t^3 - t) / 48 from the variance.
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance -= np.sum(tie_counts**3 - tie_counts) / 48.0
    if variance <= 0.0:
        return 1.0
    deviation = w_plus - mean
    correction = 0.5 * np.sign(deviation)
    z = (deviation - correction) / math.sqrt(variance)
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_paired(a, b) -> WilcoxonResult:
    """Two-sided paired signed-rank test of a against b.

    Exact for effective sample sizes up to EXACT_MAX_N, otherwise the normal
    approximation with continuity correction. All-zero differences yield
    p = 1 with the degenerate flag set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be one-dimensional and of equal length")
    if a.size < 6:
        raise ValueError("need at least 6 pairs")
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    if diffs.size == 0:
        return WilcoxonResult(p_value=1.0, statistic=0.0, n_effective=0, degenerate=True)
    ranks = rankdata(np.abs(diffs), method="average")
    w_plus = float(np.sum(ranks[diffs > 0.0]))
    if diffs.size <= EXACT_MAX_N:
        p = _exact_p_value(ranks, w_plus)
    else:
        p = _approx_p_value(ranks, w_plus)
    return WilcoxonResult(
        p_value=p, statistic=w_plus, n_effective=int(diffs.size), degenerate=False
    )
