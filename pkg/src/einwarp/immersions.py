"""Explicit immersions into Euclidean space and first-fundamental-form pullback.

Builders: sphere inclusions, rotational submanifolds over a profile (h, phi),
cylinders f0 x id, cones over spherical fibers, products of immersions, and
the warped-product representation psi(p0, p1) = p0 + sigma(p0)(p1 - q) of
Euclidean space.

Profile convention: the LAST ambient coordinate of a profile is the warping
function phi, i.e. phi = <g, e> with e the final basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonPositiveSigma, NonPositiveWarp, RankDeficient
from .geometry import Chart, FDConfig, MetricField, ScalarField, interval_chart, product_chart
from .geometry import _D1
from .library import sphere_chart

_RANK_TOL = 1e-8

Point = np.ndarray


@dataclass(frozen=True)
class ImmersionMap:
    """A pure map chart -> R^ambient_dim with full-rank Jacobian."""

    chart: Chart
    ambient_dim: int
    fn: Callable[[Point], np.ndarray]

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(p, dtype=float)), dtype=float)


def jacobian(f: ImmersionMap, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Finite-difference Jacobian, shape (ambient_dim, chart.dim)."""
    p = np.asarray(p, dtype=float)
    hs = cfg.steps(f.chart)
    offs, coef = _D1[cfg.order]
    J = np.zeros((f.ambient_dim, f.chart.dim))
    for i in range(f.chart.dim):
        acc = np.zeros(f.ambient_dim)
        for o, c in zip(offs, coef):
            q = p.copy()
            q[i] += o * hs[i]
            acc += c * np.asarray(f.fn(q), dtype=float)
        J[:, i] = acc / hs[i]
    return J


def pullback_metric(f: ImmersionMap, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """First fundamental form J^T J; raises when J drops rank."""
    J = jacobian(f, p, cfg)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] < _RANK_TOL:
        raise RankDeficient(
            f"smallest singular value {sv[-1]:.3e} below {_RANK_TOL:g} at {p}"
        )
    return J.T @ J


def pullback_field(f: ImmersionMap, cfg: FDConfig = FDConfig()) -> MetricField:
    """The induced metric as a MetricField on the immersion's chart."""
    return MetricField(f.chart, lambda p: pullback_metric(f, p, cfg))


def sphere_point(angles: np.ndarray, k: int, r: float) -> np.ndarray:
    """Spherical coordinates -> point of S^k(r) in R^(k+1)."""
    out = np.empty(k + 1)
    sin_prod = r
    for i in range(k):
        out[i] = sin_prod * np.cos(angles[i])
        sin_prod *= np.sin(angles[i])
    out[k] = sin_prod
    return out


def sphere_inclusion(k: int, r: float = 1.0, margin: float | None = None) -> ImmersionMap:
    """Inclusion of the radius-r round sphere S^k into R^(k+1)."""
    chart = sphere_chart(k) if margin is None else sphere_chart(k, margin)
    return ImmersionMap(chart, k + 1, lambda p: sphere_point(p, k, r))


def rotational_immersion(h: ImmersionMap, phi: ScalarField, fiber_k: int) -> ImmersionMap:
    """Rotational submanifold (z, y) -> (h(z), phi(z) * y) with y on S^fiber_k(1)."""
    if phi.chart.dim != h.chart.dim:
        raise ValueError("profile height phi must live on the chart of h")
    fiber = sphere_chart(fiber_k)
    chart = product_chart(h.chart, fiber)
    dz = h.chart.dim
    amb = h.ambient_dim + fiber_k + 1

    def fn(p):
        z, y = p[:dz], p[dz:]
        w = float(phi.fn(z))
        if w <= 0.0:
            raise NonPositiveWarp(f"phi({z}) = {w:g} <= 0")
        return np.concatenate([np.asarray(h.fn(z), dtype=float),
                               w * sphere_point(y, fiber_k, 1.0)])

    return ImmersionMap(chart, amb, fn)


def cylinder_immersion(f0: ImmersionMap, k: int, halfwidth: float = 1.0,
                       margin: float = 0.1) -> ImmersionMap:
    """Cylinder f0 x id over a flat k-dimensional Euclidean factor."""
    if k < 1:
        raise ValueError(f"cylinder factor dimension must be >= 1, got {k}")
    names = [f"y{i}" for i in range(1, k + 1)]
    box = Chart(tuple(names), (-halfwidth,) * k, (halfwidth,) * k, margin)
    chart = product_chart(f0.chart, box)
    dz = f0.chart.dim

    def fn(p):
        return np.concatenate([np.asarray(f0.fn(p[:dz]), dtype=float), p[dz:]])

    return ImmersionMap(chart, f0.ambient_dim + k, fn)


def cone_map(fiber_inclusion: ImmersionMap, t_interval: tuple[float, float],
             margin: float = 0.1) -> ImmersionMap:
    """Cone (s, y) -> (s/r) g0(y) over a spherical fiber g0 of radius r.

    The (s/r) normalization makes s an arclength parameter, so the pullback
    is ds^2 + (s/r)^2 (pullback of g0).
    """
    lo, hi = float(t_interval[0]), float(t_interval[1])
    if not 0.0 < lo < hi:
        raise ValueError(f"t_interval must lie in (0, inf), got ({lo}, {hi})")
    r = float(np.linalg.norm(fiber_inclusion(fiber_inclusion.chart.center())))
    if r <= 0.0:
        raise ValueError("fiber inclusion must have positive radius")
    ray = interval_chart("s", lo, hi, margin=min(margin, 0.25 * (hi - lo)))
    chart = product_chart(ray, fiber_inclusion.chart)

    def fn(p):
        return (p[0] / r) * np.asarray(fiber_inclusion.fn(p[1:]), dtype=float)

    return ImmersionMap(chart, fiber_inclusion.ambient_dim, fn)


def product_immersion(f1: ImmersionMap, f2) -> ImmersionMap:
    """Concatenate two immersions on the product chart.

    ``f2`` may be a fixed ambient vector, in which case the factor is a single
    point and the result is f1 with constant extra coordinates.
    """
    if not isinstance(f2, ImmersionMap):
        point = np.asarray(f2, dtype=float).ravel()
        return ImmersionMap(
            f1.chart,
            f1.ambient_dim + point.size,
            lambda p: np.concatenate([np.asarray(f1.fn(p), dtype=float), point]),
        )
    chart = product_chart(f1.chart, f2.chart)
    d1 = f1.chart.dim

    def fn(p):
        return np.concatenate([np.asarray(f1.fn(p[:d1]), dtype=float),
                               np.asarray(f2.fn(p[d1:]), dtype=float)])

    return ImmersionMap(chart, f1.ambient_dim + f2.ambient_dim, fn)


def point_cloud_text(f: ImmersionMap, n: int = 256, seed: int = 0,
                     delimiter: str = ",", cfg: FDConfig = FDConfig()) -> str:
    """Sampled ambient coordinates of the image, one row per point.

    Intended for external visualization; rows follow the deterministic chart
    sampler, 17 significant digits.
    """
    from .sampling import chart_samples

    pts = chart_samples(f.chart, n, seed)
    lines = [delimiter.join(f"{v:.17g}" for v in f(p)) for p in pts]
    return "\n".join(lines) + "\n"


def write_point_cloud(f: ImmersionMap, path, n: int = 256, seed: int = 0,
                      delimiter: str = ",") -> None:
    with open(path, "w") as fh:
        fh.write(point_cloud_text(f, n, seed, delimiter))


@dataclass(frozen=True)
class WarpedRepresentation:
    """Data of a warped-product representation of Euclidean space.

    The base factor V spans the first dim(V_chart) ambient coordinates and the
    sphere factor the last (dim(sphere_chart) + 1); they overlap in exactly one
    shared axis, which must carry q (so |q| = r and q = r * e_shared).
    """

    q: np.ndarray
    r: float
    V_chart: Chart
    sphere_chart: Chart

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        if self.r <= 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        amb = self.V_chart.dim + self.sphere_chart.dim
        if self.q.shape != (amb,):
            raise ValueError(f"q must have length {amb}, got {self.q.shape}")
        if abs(np.linalg.norm(self.q) - self.r) > 1e-12 * self.r:
            raise ValueError("|q| must equal r")
        shared = self.V_chart.dim - 1
        rest = np.delete(self.q, shared)
        if abs(self.q[shared] - self.r) > 1e-12 * self.r or np.any(np.abs(rest) > 1e-12 * self.r):
            raise ValueError("q must be r times the shared coordinate axis")

    @property
    def ambient_dim(self) -> int:
        return self.V_chart.dim + self.sphere_chart.dim


def warped_representation(rep: WarpedRepresentation) -> ImmersionMap:
    """psi(p0, p1) = p0 + sigma(p0)(p1 - q) with sigma(p0) = <p0, q>/r^2.

    The pullback is the flat metric on V plus sigma^2 times the round metric
    of S(r): Euclidean space as a warped product over V.
    """
    chart = product_chart(rep.V_chart, rep.sphere_chart)
    dv = rep.V_chart.dim
    ks = rep.sphere_chart.dim
    amb = rep.ambient_dim
    q = rep.q
    r2 = rep.r * rep.r

    def fn(p):
        p0 = np.zeros(amb)
        p0[:dv] = p[:dv]
        p1 = np.zeros(amb)
        p1[dv - 1:] = sphere_point(p[dv:], ks, rep.r)
        sigma = float(p0 @ q) / r2
        if sigma <= 0.0:
            raise NonPositiveSigma(f"sigma = {sigma:g} <= 0 at p0 = {p0[:dv]}")
        return p0 + sigma * (p1 - q)

    return ImmersionMap(chart, amb, fn)
