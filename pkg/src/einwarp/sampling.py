"""Deterministic quasi-uniform sampling of chart interiors.

Scrambled Halton points: reproducible for a given (dimension, count, seed),
low-discrepancy so residual checks cover the sampling box evenly.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from .geometry import Chart


def chart_samples(chart: Chart, n: int, seed: int = 0) -> np.ndarray:
    """n quasi-uniform points in the margined interior of the chart, (n, dim)."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    sampler = qmc.Halton(d=chart.dim, scramble=True, seed=seed)
    u = sampler.random(n)
    lo, hi = chart.sampling_box()
    return lo + u * (hi - lo)
