"""Levi-Civita connection and curvature from numerically differentiated metrics.

Sign conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
and Ric_ij = R^k_ikj, so round spheres carry positive Ricci curvature.

Derivatives of the Christoffel symbols are obtained by differencing the
symbols themselves (nested finite differences) rather than by third-order
stencils on the metric; at dimensions <= 9 this stays within the stated
tolerances and keeps the code a single recursion deep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlane, SingularMetric
from .geometry import FDConfig, MetricField, ScalarField, gradient, metric_partial, partial2
from .geometry import _D1  # shared first-derivative stencils

_COND_LIMIT = 1e12
_GRAM_LIMIT = 1e-10


def _metric_inverse(G: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh(0.5 * (G + G.T))
    small, big = np.min(np.abs(vals)), np.max(np.abs(vals))
    if small == 0.0 or big / small > _COND_LIMIT:
        raise SingularMetric(f"metric condition number exceeds {_COND_LIMIT:g}")
    return np.linalg.inv(G)


def christoffel(g: MetricField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Christoffel symbols of the second kind, indexed as Gamma[k, i, j]."""
    p = np.asarray(p, dtype=float)
    d = g.chart.dim
    ginv = _metric_inverse(g(p))
    dg = np.empty((d, d, d))  # dg[l, i, j] = d_l g_ij
    for l in range(d):
        dg[l] = metric_partial(g, p, l, cfg)
    # S[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    S = np.transpose(dg, (0, 1, 2)) + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    return 0.5 * np.einsum("kl,ijl->kij", ginv, S)


def _christoffel_and_derivs(g: MetricField, p, cfg: FDConfig) -> tuple[np.ndarray, np.ndarray]:
    """Gamma at p plus dGamma[m, k, i, j] = d_m Gamma^k_ij by nested FD."""
    p = np.asarray(p, dtype=float)
    d = g.chart.dim
    gam = christoffel(g, p, cfg)
    hs = cfg.steps(g.chart)
    offs, coef = _D1[cfg.order]
    dgam = np.empty((d, d, d, d))
    for m in range(d):
        acc = np.zeros((d, d, d))
        for o, c in zip(offs, coef):
            q = p.copy()
            q[m] += o * hs[m]
            acc += c * christoffel(g, q, cfg)
        dgam[m] = acc / hs[m]
    return gam, dgam


def riemann(g: MetricField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Full (1,3) curvature tensor R[r, s, m, n] = (R(e_m, e_n) e_s)^r."""
    gam, dgam = _christoffel_and_derivs(g, p, cfg)
    t1 = np.einsum("mrns->rsmn", dgam)
    t2 = np.einsum("nrms->rsmn", dgam)
    t3 = np.einsum("rml,lns->rsmn", gam, gam)
    t4 = np.einsum("rnl,lms->rsmn", gam, gam)
    return t1 - t2 + t3 - t4


def ricci(g: MetricField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Ricci tensor Ric_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + quadratic terms."""
    gam, dgam = _christoffel_and_derivs(g, p, cfg)
    t1 = np.einsum("kkij->ij", dgam)
    t2 = np.einsum("ikkj->ij", dgam)
    t3 = np.einsum("kkl,lij->ij", gam, gam)
    t4 = np.einsum("kil,lkj->ij", gam, gam)
    R = t1 - t2 + t3 - t4
    return 0.5 * (R + R.T)


def scalar_curvature(g: MetricField, p, cfg: FDConfig = FDConfig()) -> float:
    ginv = _metric_inverse(g(p))
    return float(np.einsum("ij,ij->", ginv, ricci(g, p, cfg)))


def sectional(g: MetricField, p, u, v, cfg: FDConfig = FDConfig()) -> float:
    """Sectional curvature of span(u, v): <R(u,v)v, u> / Gram(u, v)."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    G = g(p)
    gram = (u @ G @ u) * (v @ G @ v) - (u @ G @ v) ** 2
    if gram <= _GRAM_LIMIT:
        raise DegeneratePlane(f"Gram determinant {gram:g} below {_GRAM_LIMIT:g}")
    R = riemann(g, p, cfg)
    low = np.einsum("ar,rsmn->asmn", G, R)
    num = np.einsum("asmn,a,s,m,n->", low, u, v, u, v)
    return float(num / gram)


def riemann_lowered(g: MetricField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Fully lowered curvature tensor R_asmn = g_ar R^r_smn."""
    return np.einsum("ar,rsmn->asmn", g(p), riemann(g, p, cfg))


def hessian(f: ScalarField, g: MetricField, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Metric Hessian: Hess f_ij = d_i d_j f - Gamma^k_ij d_k f."""
    p = np.asarray(p, dtype=float)
    d = g.chart.dim
    gam = christoffel(g, p, cfg)
    df = gradient(f, p, cfg)
    out = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            out[i, j] = out[j, i] = partial2(f, p, i, j, cfg) - gam[:, i, j] @ df
    return out


def laplacian(f: ScalarField, g: MetricField, p, cfg: FDConfig = FDConfig()) -> float:
    ginv = _metric_inverse(g(p))
    return float(np.einsum("ij,ij->", ginv, hessian(f, g, p, cfg)))


def gradient_norm_sq(f: ScalarField, g: MetricField, p, cfg: FDConfig = FDConfig()) -> float:
    p = np.asarray(p, dtype=float)
    df = gradient(f, p, cfg)
    ginv = _metric_inverse(g(p))
    return float(df @ ginv @ df)


@dataclass(frozen=True)
class CurvatureSample:
    """Ricci, scalar, and metric values at one point of a chart."""

    point: np.ndarray
    ricci: np.ndarray
    scalar: float
    metric: np.ndarray


def curvature_sample(g: MetricField, p, cfg: FDConfig = FDConfig()) -> CurvatureSample:
    p = np.asarray(p, dtype=float)
    G = g(p)
    ric = ricci(g, p, cfg)
    scal = float(np.einsum("ij,ij->", _metric_inverse(G), ric))
    return CurvatureSample(point=p, ricci=ric, scalar=scal, metric=G)
