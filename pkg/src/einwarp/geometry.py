"""Coordinate charts, scalar/metric fields, and the finite-difference engine.

Everything downstream (curvature, warped metrics, pullbacks) differentiates
through the two entry points ``partial`` / ``partial2``; keeping the stencils
here in one place keeps the error budget analyzable.

All objects are immutable after construction and evaluation is pure, so any
function in this module may be called concurrently without locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BoundaryViolation, NonFiniteValue

Point = np.ndarray

# first-derivative central stencils: {order: (offsets, coefficients*h)}
_D1 = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}
# pure second-derivative central stencils (coefficients / h^2)
_D2 = {
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
}


def _as_margins(margin, dim: int) -> tuple[float, ...]:
    if np.isscalar(margin):
        return (float(margin),) * dim
    margins = tuple(float(m) for m in margin)
    if len(margins) != dim:
        raise ValueError(f"margin needs 1 or {dim} entries, got {len(margins)}")
    return margins


@dataclass(frozen=True)
class Chart:
    """A named coordinate box with a margined sampling sub-domain.

    ``margin`` may be a single number or one value per coordinate; product
    charts concatenate the per-coordinate margins of their factors.
    """

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    margin: tuple[float, ...]

    def __init__(self, names, lower, upper, margin=0.0):
        names = tuple(str(n) for n in names)
        lower = tuple(float(x) for x in lower)
        upper = tuple(float(x) for x in upper)
        margins = _as_margins(margin, len(names))
        if len(names) < 1:
            raise ValueError("chart dimension must be >= 1")
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be distinct: {names}")
        if not (len(lower) == len(upper) == len(names)):
            raise ValueError("names, lower, upper must have equal length")
        for i, (lo, hi, mg) in enumerate(zip(lower, upper, margins)):
            if mg < 0:
                raise ValueError(f"margin must be >= 0, got {mg} at coordinate {i}")
            if not lo + 2.0 * mg < hi:
                raise ValueError(
                    f"need lower + 2*margin < upper at coordinate {names[i]}: "
                    f"{lo} + 2*{mg} !< {hi}"
                )
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "margin", margins)

    @property
    def dim(self) -> int:
        return len(self.names)

    def span(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def sampling_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Margined interior used for sampling (keeps FD stencils inside)."""
        mg = np.asarray(self.margin)
        return np.asarray(self.lower) + mg, np.asarray(self.upper) - mg

    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def contains(self, p: Point, slack: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        lo = np.asarray(self.lower) - slack
        hi = np.asarray(self.upper) + slack
        return bool(np.all(p >= lo) and np.all(p <= hi))


def interval_chart(name: str, lo: float, hi: float, margin: float = 0.0) -> Chart:
    return Chart((name,), (lo,), (hi,), margin)


def box_chart(names: Sequence[str], lo: float, hi: float, margin: float = 0.0) -> Chart:
    n = len(names)
    return Chart(tuple(names), (lo,) * n, (hi,) * n, margin)


def product_chart(a: Chart, b: Chart) -> Chart:
    """Concatenate two charts; colliding names from ``b`` get a numeric suffix."""
    names = list(a.names)
    for nm in b.names:
        new = nm
        k = 2
        while new in names:
            new = f"{nm}_{k}"
            k += 1
        names.append(new)
    return Chart(
        tuple(names),
        a.lower + b.lower,
        a.upper + b.upper,
        a.margin + b.margin,
    )


@dataclass(frozen=True)
class FDConfig:
    """Relative finite-difference step and stencil order.

    The actual step along coordinate i is ``step * (upper_i - lower_i)``.
    """

    step: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if not (1e-6 <= self.step <= 1e-1):
            raise ValueError(f"step must lie in [1e-6, 1e-1], got {self.step}")
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")

    def steps(self, chart: Chart) -> np.ndarray:
        return self.step * chart.span()


@dataclass(frozen=True)
class ScalarField:
    """A pure map point -> real on a chart.

    ``grad`` is an optional exact-derivative callback (point -> gradient
    vector).  When present it overrides finite differences in ``partial`` and
    is differenced once (instead of twice) in ``partial2``.
    """

    chart: Chart
    fn: Callable[[Point], float]
    grad: Optional[Callable[[Point], np.ndarray]] = None

    def __call__(self, p) -> float:
        return float(self.fn(np.asarray(p, dtype=float)))


@dataclass(frozen=True)
class MetricField:
    """A pure map point -> symmetric positive-definite dim x dim matrix.

    ``partial_fn`` optionally supplies exact coordinate derivatives
    (point, i) -> matrix and then overrides finite differences.
    """

    chart: Chart
    fn: Callable[[Point], np.ndarray]
    partial_fn: Optional[Callable[[Point, int], np.ndarray]] = None

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(p, dtype=float)), dtype=float)


def constant_metric(chart: Chart, matrix) -> MetricField:
    mat = np.asarray(matrix, dtype=float)
    zero = np.zeros_like(mat)
    return MetricField(chart, lambda p: mat, partial_fn=lambda p, i: zero)


def euclidean_metric(chart: Chart) -> MetricField:
    return constant_metric(chart, np.eye(chart.dim))


def _check_stencil(chart: Chart, p: Point, i: int, reach: float) -> None:
    if p[i] - reach < chart.lower[i] or p[i] + reach > chart.upper[i]:
        raise BoundaryViolation(
            f"stencil of half-width {reach:g} at {chart.names[i]}={p[i]:g} leaves "
            f"domain [{chart.lower[i]:g}, {chart.upper[i]:g}]"
        )


def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise NonFiniteValue(f"field evaluation returned {x!r}")
    return x


def partial(f: ScalarField, p, i: int, cfg: FDConfig = FDConfig()) -> float:
    """Central-difference estimate of the i-th partial derivative of f at p."""
    p = np.asarray(p, dtype=float)
    if f.grad is not None:
        return float(np.asarray(f.grad(p), dtype=float)[i])
    h = cfg.steps(f.chart)[i]
    offs, coef = _D1[cfg.order]
    _check_stencil(f.chart, p, i, offs[-1] * h)
    acc = 0.0
    for o, c in zip(offs, coef):
        q = p.copy()
        q[i] += o * h
        acc += c * _finite(float(f.fn(q)))
    return acc / h


def gradient(f: ScalarField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if f.grad is not None:
        return np.asarray(f.grad(p), dtype=float)
    return np.array([partial(f, p, i, cfg) for i in range(f.chart.dim)])


def partial2(f: ScalarField, p, i: int, j: int, cfg: FDConfig = FDConfig()) -> float:
    """Mixed second derivative; exactly symmetric in (i, j) (shared stencil)."""
    p = np.asarray(p, dtype=float)
    i, j = (i, j) if i <= j else (j, i)
    hs = cfg.steps(f.chart)

    if f.grad is not None:
        # differentiate the exact gradient once: d_j (grad_i)
        h = hs[j]
        offs, coef = _D1[cfg.order]
        _check_stencil(f.chart, p, j, offs[-1] * h)
        acc = 0.0
        for o, c in zip(offs, coef):
            q = p.copy()
            q[j] += o * h
            acc += c * _finite(float(np.asarray(f.grad(q), dtype=float)[i]))
        return acc / h

    if i == j:
        h = hs[i]
        offs, coef = _D2[cfg.order]
        _check_stencil(f.chart, p, i, 2 * offs[-1] * h)
        acc = 0.0
        for o, c in zip(offs, coef):
            q = p.copy()
            q[i] += o * h
            acc += c * _finite(float(f.fn(q)))
        return acc / (h * h)

    offs, coef = _D1[cfg.order]
    _check_stencil(f.chart, p, i, 2 * offs[-1] * hs[i])
    _check_stencil(f.chart, p, j, 2 * offs[-1] * hs[j])
    acc = 0.0
    for oi, ci in zip(offs, coef):
        for oj, cj in zip(offs, coef):
            q = p.copy()
            q[i] += oi * hs[i]
            q[j] += oj * hs[j]
            acc += ci * cj * _finite(float(f.fn(q)))
    return acc / (hs[i] * hs[j])


def hessian_matrix(f: ScalarField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Plain coordinate second-derivative matrix (no connection correction)."""
    d = f.chart.dim
    out = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            out[i, j] = out[j, i] = partial2(f, p, i, j, cfg)
    return out


def metric_partial(g: MetricField, p, i: int, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Componentwise i-th partial derivative of the metric; output symmetrized."""
    p = np.asarray(p, dtype=float)
    if g.partial_fn is not None:
        out = np.asarray(g.partial_fn(p, i), dtype=float)
        return 0.5 * (out + out.T)
    h = cfg.steps(g.chart)[i]
    offs, coef = _D1[cfg.order]
    _check_stencil(g.chart, p, i, offs[-1] * h)
    acc = np.zeros((g.chart.dim, g.chart.dim))
    for o, c in zip(offs, coef):
        q = p.copy()
        q[i] += o * h
        val = np.asarray(g.fn(q), dtype=float)
        if not np.all(np.isfinite(val)):
            raise NonFiniteValue(f"metric evaluation non-finite at {q}")
        acc += c * val
    acc /= h
    return 0.5 * (acc + acc.T)
