"""Rendering of convergence curves to image files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "gpbo": {"color": "#d62728", "linestyle": "--"},
    "wbgp16": {"color": "#1f77b4", "linestyle": "-"},
    "wbgp32": {"color": "#2ca02c", "linestyle": "-"},
}


def render_convergence_figure(problem: str, per_algorithm, path) -> Path:
    """Plot mean best-so-far with a one-standard-deviation band per algorithm.

    per_algorithm maps an algorithm key to (mean, std) arrays over steps, as
    produced by the campaign's convergence tables.
    """
    from .campaign import ALGORITHM_LABELS, ALGORITHM_ORDER

    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for algorithm in ALGORITHM_ORDER:
        if algorithm not in per_algorithm:
            continue
        mean, std = per_algorithm[algorithm]
        steps = np.arange(1, mean.size + 1)
        style = _STYLE.get(algorithm, {})
        ax.plot(steps, mean, label=ALGORITHM_LABELS[algorithm], **style)
        ax.fill_between(
            steps, mean - std, mean + std, alpha=0.15, color=style.get("color")
        )
    ax.set_xlabel("objective evaluations")
    ax.set_ylabel("best observed value")
    ax.set_title(problem)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
