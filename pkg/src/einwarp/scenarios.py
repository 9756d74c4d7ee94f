"""Scenario registry: named geometries, their verification checks, and dumps.

Each scenario builds metrics/immersions from the library modules, runs a
declared list of checks in a fixed order, and can emit a per-sample table for
external plotting.  Everything is deterministic given (seed, FD config).

Normalization convention: identity checks take the fiber already normalized to
eps in {-1, 0, +1}; scenarios that realize an unnormalized fiber (e.g. the
flat cone over a sphere of radius 1/sqrt(c)) apply the homothety themselves
and document the rescaled warping function they pass to the checks.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from . import checks as ck
from . import curvature
from .errors import InvalidParameter, ParameterConstraintViolated, UnknownScenario
from .geometry import (
    Chart,
    FDConfig,
    MetricField,
    ScalarField,
    box_chart,
    constant_metric,
    interval_chart,
    product_chart,
)
from .immersions import (
    ImmersionMap,
    cone_map,
    cylinder_immersion,
    product_immersion,
    pullback_field,
    rotational_immersion,
    sphere_inclusion,
    sphere_point,
    WarpedRepresentation,
    warped_representation,
)
from .library import flat_metric, hyperbolic_metric, sphere_chart, sphere_diag, sphere_metric
from .sampling import chart_samples
from .warp import (
    EinsteinData,
    WarpSolution,
    _hermite_eval,
    closed_form_u,
    closed_form_warp,
    fiber_ricci_constant,
    gs_first_integral_residual,
    gs_warp,
    residual_eq2,
    residual_eq3,
    residual_eq4,
    residuals_reduced,
    warped_metric,
    product_metric,
)


@dataclass(frozen=True)
class EngineConfig:
    """Numerical knobs shared by every check of a run."""

    fd: FDConfig = FDConfig()
    seed: int = 0
    samples: int = ck.DEFAULT_SAMPLES
    tol: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "fd_step": self.fd.step,
            "fd_order": self.fd.order,
            "seed": self.seed,
            "samples": self.samples,
            "tol_override": self.tol,
        }

    def tol_or(self, default: float) -> float:
        return default if self.tol is None else self.tol


def _timestamp() -> str:
    """Deterministic report timestamp; honors SOURCE_DATE_EPOCH."""
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------


def _interval_metric(name: str, lo: float, hi: float, margin: float) -> MetricField:
    return constant_metric(interval_chart(name, lo, hi, margin), np.eye(1))


def _grad_norm_field(phi: ScalarField, g: MetricField, cfg: FDConfig) -> ScalarField:
    def fn(p):
        return math.sqrt(max(0.0, curvature.gradient_norm_sq(phi, g, p, cfg)))

    return ScalarField(g.chart, fn)


def _positive_run_window(sol: WarpSolution, probes: int = 512) -> tuple[float, float, int]:
    """Longest sub-interval of the solution domain where phi' keeps one sign.

    Returns (lo, hi, sign); the base construction I x_{phi'} N needs |phi'|
    smooth and positive, so the window must avoid zeros of phi'.
    """
    ts = sol.grid(probes)
    d = np.asarray(sol.phi1(ts))
    floor = 1e-6 * np.max(np.abs(d))
    best = (0, -1, 0)
    for sign in (1, -1):
        mask = sign * d > floor
        start = None
        for i, ok in enumerate(list(mask) + [False]):
            if ok and start is None:
                start = i
            elif not ok and start is not None:
                if i - 1 - start > best[1] - best[0]:
                    best = (start, i - 1, sign)
                start = None
    i0, i1, sign = best
    if sign == 0 or i1 <= i0:
        raise ParameterConstraintViolated(
            "phi' bounded away from zero on a sub-interval",
            "no usable window found for the base warped product",
        )
    return float(ts[i0]), float(ts[i1]), sign


def _base_window_chart(sol: WarpSolution, max_width: float = 3.0) -> tuple[Chart, int]:
    """Interval chart (with margin) strictly inside the positive-|phi'| window."""
    rlo, rhi, sign = _positive_run_window(sol)
    run = rhi - rlo
    lo = rlo + 0.05 * run
    hi = min(rhi - 0.02 * run, lo + max_width)
    margin = 0.1 * (hi - lo)
    return interval_chart("t", lo, hi, margin), sign


def _solution_fields(sol: WarpSolution, chart: Chart, sign: int) -> tuple[ScalarField, ScalarField]:
    """(phi, |phi'|) as fields reading coordinate 0 of `chart`."""
    phi = sol.as_scalar_field(chart, coord=0)

    def psi_fn(p):
        return sign * float(sol.phi1(p[0]))

    def psi_grad(p):
        out = np.zeros(chart.dim)
        out[0] = sign * float(sol.phi2(p[0]))
        return out

    return phi, ScalarField(chart, psi_fn, grad=psi_grad)


def _leaf_metric(n: int, m: int, eps: int, rho: float) -> MetricField:
    """Einstein (m-1)-manifold with the Ricci constant the reduction forces."""
    const = fiber_ricci_constant(n, m, eps, rho)
    if m - 1 == 1:
        return flat_metric(["x1"])
    if const > 0.0:
        return sphere_metric(m - 1, math.sqrt((m - 2) / const))
    if const < 0.0:
        scale = math.sqrt((m - 2) / (-const))
        return _scaled_hyperbolic(m - 1, scale)
    return flat_metric([f"x{i}" for i in range(1, m)])


def _scaled_hyperbolic(k: int, scale: float) -> MetricField:
    base = hyperbolic_metric(k)
    s2 = scale * scale
    return MetricField(base.chart, lambda p: s2 * base.fn(p))


def _fiber_metric(k: int, eps: int) -> MetricField:
    if eps == 1:
        return sphere_metric(k, 1.0)
    if eps == -1:
        return hyperbolic_metric(k)
    return flat_metric([f"z{i}" for i in range(1, k + 1)])


# ---------------------------------------------------------------------------
# scenario: product of two round spheres
# ---------------------------------------------------------------------------


def _spheres_product_build(p: dict):
    n, m, rho = p["n"], p["m"], p["rho"]
    r1 = math.sqrt((m - 1) / rho)
    r2 = math.sqrt((n - m - 1) / rho)
    g = product_metric(sphere_metric(m, r1), sphere_metric(n - m, r2))
    f = product_immersion(sphere_inclusion(m, r1), sphere_inclusion(n - m, r2))
    return g, f, r1, r2


def _spheres_product_checks(p: dict, eng: EngineConfig) -> list:
    n, m = p["n"], p["m"]
    g, f, r1, r2 = _spheres_product_build(p)
    out = [
        ck.einstein_check(g, eng.samples, eng.tol_or(ck.CURVATURE_TOL), eng.fd,
                          eng.seed, check_id="einstein-product"),
        ck.isometry_check(f, g, eng.samples, eng.tol_or(ck.ISOMETRY_TOL), eng.fd,
                          eng.seed, check_id="isometry-product"),
    ]
    p0 = chart_samples(g.chart, 1, eng.seed)[0]
    ei = np.eye(n)
    k_mixed = curvature.sectional(g, p0, ei[0], ei[m], eng.fd)
    out.append(ck.make_result("sectional-mixed-plane", [abs(k_mixed)],
                              eng.tol_or(1e-4), estimate=k_mixed))
    k1 = curvature.sectional(g, p0, ei[0], ei[1], eng.fd)
    k2 = curvature.sectional(g, p0, ei[m], ei[m + 1], eng.fd)
    res = [abs(k1 - 1.0 / r1**2), abs(k2 - 1.0 / r2**2)]
    out.append(ck.make_result("sectional-intra-plane", res, eng.tol_or(ck.CURVATURE_TOL),
                              estimate=k1))
    return out


def _spheres_product_dump(p: dict, eng: EngineConfig):
    g, f, r1, r2 = _spheres_product_build(p)
    rho_hat = p["rho"]
    cols = [
        ("einstein-product", lambda q: _einstein_residual_at(g, q, rho_hat, eng.fd)),
        ("isometry-product", lambda q: float(np.max(np.abs(
            pullback_field(f, eng.fd).fn(q) - g(q))))),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(g, q, eng.fd)),
    ]
    return _dump_table(g.chart, cols, eng)


# ---------------------------------------------------------------------------
# scenario: generalized-Schwarzschild metric with its rotational immersion
# ---------------------------------------------------------------------------


def _gs_build(p: dict, eng: EngineConfig):
    n, c = p["n"], p["c"]
    t_lo, t_hi, t_table = p["t_lo"], p["t_hi"], p["t_table"]
    sol = gs_warp(n, c, t_table, p["ode_step"])
    mt = min(0.25, 0.8 * t_lo, t_table - t_hi)
    ichart = interval_chart("t", t_lo - mt, t_hi + mt, margin=mt)
    _, psi_i = _solution_fields(sol, ichart, sign=1)
    base = warped_metric(_interval_metric("t", t_lo - mt, t_hi + mt, mt),
                         sphere_metric(1, 1.0), psi_i)
    phi_b = sol.as_scalar_field(base.chart, coord=0)
    total = warped_metric(base, sphere_metric(n - 2, 1.0), phi_b)
    return sol, ichart, base, phi_b, total


def _gs_profile(sol: WarpSolution, base_chart: Chart) -> ImmersionMap:
    """Profile (phi' cos th, phi' sin th, Z(t)) with Z' = sqrt(1 - phi'^2 - phi''^2).

    Z is accumulated with composite Simpson on the ODE table grid; the height
    is only defined where 1 - phi'^2 - phi''^2 >= 0.
    """
    lo, hi = sol.domain
    ts = np.linspace(lo, hi, 4001)
    z2 = 1.0 - np.asarray(sol.phi1(ts)) ** 2 - np.asarray(sol.phi2(ts)) ** 2
    lo_need = base_chart.lower[0]
    needed = ts >= lo_need - (hi - lo) / 4000.0
    if np.min(z2[needed]) < -1e-10:
        raise ParameterConstraintViolated(
            "1 - phi'^2 - phi''^2 >= 0 on the chart",
            "rotational profile height is not real for these GS parameters",
        )
    dz = np.sqrt(np.clip(z2, 0.0, None))
    z = cumulative_simpson(dz, x=ts, initial=0.0)

    def fn(q):
        t, th = q[0], q[1]
        w1 = float(sol.phi1(t))
        height = float(_hermite_eval(ts, z, dz, np.asarray(t, dtype=float)))
        return np.array([w1 * np.cos(th), w1 * np.sin(th), height])

    return ImmersionMap(base_chart, 3, fn)


def _gs_checks(p: dict, eng: EngineConfig) -> list:
    n, c = p["n"], p["c"]
    sol, ichart, base, phi_b, total = _gs_build(p, eng)
    out = []
    probe = sol.grid(801)
    out.append(ck.make_result("gs-first-integral",
                              np.abs(gs_first_integral_residual(sol, probe)),
                              eng.tol_or(1e-8)))
    if n == 5:
        exact = np.sqrt(probe**2 - c)
        out.append(ck.make_result("gs-closed-form",
                                  np.abs(np.asarray(sol.phi(probe)) - exact),
                                  eng.tol_or(1e-7)))
    out.append(ck.einstein_check(total, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                                 eng.fd, eng.seed, check_id="einstein-gs"))

    t_star = min(max(1.0, p["t_lo"]), p["t_hi"])
    lo, hi = total.chart.sampling_box()
    p0 = 0.5 * (lo + hi)
    p0[0] = t_star
    planes = [(0, 1), (0, 2), (1, 2), (2, 3)]
    ks = [curvature.sectional(total, p0, np.eye(n)[i], np.eye(n)[j], eng.fd)
          for i, j in planes]
    out.append(ck.threshold_check("sectional-spread", max(ks) - min(ks), 1e-2))

    profile = _gs_profile(sol, base.chart)
    full = rotational_immersion(profile, phi_b, n - 2)
    out.append(ck.isometry_check(full, total, eng.samples, eng.tol_or(ck.ISOMETRY_TOL),
                                 eng.fd, eng.seed, check_id="gs-rotational-isometry"))
    out.append(ck.gradient_bound_check(
        _with_last_coordinate(profile, phi_b), eng.samples, cfg=eng.fd, seed=eng.seed,
        check_id="gs-gradient-bound"))

    data2 = EinsteinData(n=n, m=2, rho=0.0, eps=1)
    pts = chart_samples(base.chart, eng.samples, eng.seed)
    res = [abs(residual_eq2(data2, base, phi_b, q, eng.fd)) for q in pts]
    out.append(ck.make_result("gs-eq2-residual", res, eng.tol_or(1e-4)))
    return out


def _with_last_coordinate(h: ImmersionMap, phi: ScalarField) -> ImmersionMap:
    """Append phi as the final ambient coordinate (profile convention)."""

    def fn(q):
        return np.concatenate([np.asarray(h.fn(q), dtype=float), [float(phi.fn(q))]])

    return ImmersionMap(h.chart, h.ambient_dim + 1, fn)


def _gs_dump(p: dict, eng: EngineConfig):
    sol, ichart, base, phi_b, total = _gs_build(p, eng)
    phi_t = sol.as_scalar_field(total.chart, coord=0)
    cols = [
        ("einstein-gs", lambda q: _einstein_residual_at(total, q, 0.0, eng.fd)),
        ("gs-first-integral", lambda q: abs(float(gs_first_integral_residual(sol, q[0])))),
        ("warp_phi", lambda q: float(sol.phi(q[0]))),
        ("grad_phi_norm", lambda q: math.sqrt(max(0.0, curvature.gradient_norm_sq(
            phi_t, total, q, eng.fd)))),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(total, q, eng.fd)),
    ]
    return _dump_table(total.chart, cols, eng)


# ---------------------------------------------------------------------------
# scenario: flat cone (cylinder x cone splitting with positive gradient)
# ---------------------------------------------------------------------------


def _flat_cone_build(p: dict):
    n, m, c = p["n"], p["m"], p["c"]
    s_lo, s_hi = p["s_lo"], p["s_hi"]
    k = n - m
    r_f = 1.0 / math.sqrt(c)
    nbox = box_chart([f"x{i}" for i in range(1, m)], -1.0, 1.0, margin=0.1)

    def f0_fn(q):
        return np.concatenate([q, [0.0, 0.0]])

    f0 = ImmersionMap(nbox, m + 1, f0_fn)
    ms = min(0.25, 0.8 * s_lo)
    cone = cone_map(sphere_inclusion(k, r_f), (s_lo - ms, s_hi + ms), margin=ms)
    full = product_immersion(f0, cone)

    ray = interval_chart("s", s_lo - ms, s_hi + ms, margin=ms)
    sigma = ScalarField(ray, lambda q: q[0] / r_f,
                        grad=lambda q: np.array([1.0 / r_f]))
    cone_metric = warped_metric(_interval_metric("s", s_lo - ms, s_hi + ms, ms),
                                sphere_metric(k, r_f), sigma)
    expected = product_metric(constant_metric(nbox, np.eye(m - 1)), cone_metric)

    l_chart = product_chart(nbox, ray)
    l_metric = constant_metric(l_chart, np.eye(m))
    sq = math.sqrt(c)
    phi_raw = ScalarField(l_chart, lambda q: sq * q[m - 1],
                          grad=lambda q: _unit_grad(m, m - 1, sq))
    phi_norm = ScalarField(l_chart, lambda q: q[m - 1],
                           grad=lambda q: _unit_grad(m, m - 1, 1.0))
    return full, expected, l_chart, l_metric, phi_raw, phi_norm


def _unit_grad(dim: int, coord: int, value: float) -> np.ndarray:
    out = np.zeros(dim)
    out[coord] = value
    return out


def _flat_cone_profile(p: dict, l_chart: Chart) -> ImmersionMap:
    m, c = p["m"], p["c"]
    sa, sb = math.sqrt(1.0 - c), math.sqrt(c)

    def fn(q):
        x, s = q[: m - 1], q[m - 1]
        return np.concatenate([x, [sa * s, 0.0, sb * s]])

    return ImmersionMap(l_chart, m + 2, fn)


def _flat_cone_checks(p: dict, eng: EngineConfig) -> list:
    n, m = p["n"], p["m"]
    full, expected, l_chart, l_metric, phi_raw, phi_norm = _flat_cone_build(p)
    out = [
        ck.isometry_check(full, expected, eng.samples, eng.tol_or(ck.ISOMETRY_TOL),
                          eng.fd, eng.seed, check_id="isometry-cone-product"),
        ck.einstein_check(expected, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                          eng.fd, eng.seed, check_id="einstein-flat-cone"),
        ck.constancy_check(_grad_norm_field(phi_raw, l_metric, eng.fd), eng.samples,
                           eng.tol_or(1e-8), eng.seed, check_id="grad-phi-constancy"),
        ck.gradient_bound_check(_flat_cone_profile(p, l_chart), eng.samples,
                                cfg=eng.fd, seed=eng.seed,
                                check_id="gradient-bound-profile"),
    ]
    data = EinsteinData(n=n, m=m, rho=0.0, eps=1, mu=0.0, s_l=0.0)
    out.append(ck.trace_identity_check(data, l_metric, phi_norm, eng.samples,
                                       eng.tol_or(1e-4), eng.fd, eng.seed))
    out.append(ck.combined_identity_check(data, l_metric, phi_norm, eng.samples,
                                          eng.tol_or(1e-4), eng.fd, eng.seed))
    return out


def _flat_cone_dump(p: dict, eng: EngineConfig):
    full, expected, l_chart, l_metric, phi_raw, phi_norm = _flat_cone_build(p)
    m = p["m"]
    pull = pullback_field(full, eng.fd)
    cols = [
        ("isometry-cone-product", lambda q: float(np.max(np.abs(pull.fn(q) - expected(q))))),
        ("einstein-flat-cone", lambda q: _einstein_residual_at(expected, q, 0.0, eng.fd)),
        ("warp_phi", lambda q: math.sqrt(p["c"]) * q[m - 1]),
        ("grad_phi_norm", lambda q: math.sqrt(p["c"])),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(expected, q, eng.fd)),
    ]
    return _dump_table(expected.chart, cols, eng)


# ---------------------------------------------------------------------------
# scenario: cylinder over a flat torus
# ---------------------------------------------------------------------------


def _cylinder_build(p: dict):
    n, m = p["n"], p["m"]
    r1, r2 = p["r1"], p["r2"]
    torus = product_immersion(sphere_inclusion(1, r1), sphere_inclusion(1, r2))
    f0_l = cylinder_immersion(torus, m - 2)
    full = cylinder_immersion(f0_l, n - m)
    diag = [r1 * r1, r2 * r2] + [1.0] * (n - 2)
    expected = constant_metric(full.chart, np.diag(diag))
    return full, expected, m


def _cylinder_checks(p: dict, eng: EngineConfig) -> list:
    full, expected, m = _cylinder_build(p)
    out = [
        ck.isometry_check(full, expected, eng.samples, eng.tol_or(ck.ISOMETRY_TOL),
                          eng.fd, eng.seed, check_id="isometry-cylinder"),
        ck.einstein_check(expected, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                          eng.fd, eng.seed, check_id="einstein-cylinder"),
    ]
    from .immersions import jacobian

    pts = chart_samples(full.chart, eng.samples, eng.seed)
    res = []
    for q in pts:
        J = jacobian(full, q, eng.fd)
        res.append(float(np.max(np.abs(J[:, :m].T @ J[:, m:]))))
    out.append(ck.make_result("jacobian-block-orthogonality", res, eng.tol_or(1e-10)))
    return out


def _cylinder_dump(p: dict, eng: EngineConfig):
    full, expected, m = _cylinder_build(p)
    pull = pullback_field(full, eng.fd)
    cols = [
        ("isometry-cylinder", lambda q: float(np.max(np.abs(pull.fn(q) - expected(q))))),
        ("einstein-cylinder", lambda q: _einstein_residual_at(expected, q, 0.0, eng.fd)),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(expected, q, eng.fd)),
    ]
    return _dump_table(full.chart, cols, eng)


# ---------------------------------------------------------------------------
# scenarios: closed-form warping functions (three signs of rho)
# ---------------------------------------------------------------------------


def _prop2_bundle(p: dict, eng: EngineConfig):
    n, m = p["n"], p["m"]
    rho, eps = p["rho"], int(p["eps"])
    data = EinsteinData.double_einstein(n, m, rho, eps)
    if rho == 0.0:
        sol = closed_form_warp(data)
    else:
        sol = closed_form_warp(data, p["a"], p["b"])
    ichart, sign = _base_window_chart(sol)
    phi_i, psi_i = _solution_fields(sol, ichart, sign)
    leaf = _leaf_metric(n, m, eps, rho)
    base = warped_metric(constant_metric(ichart, np.eye(1)), leaf, psi_i)
    phi_b = sol.as_scalar_field(base.chart, coord=0)
    fiber = _fiber_metric(n - m, eps)
    total = warped_metric(base, fiber, phi_b)
    return data, sol, base, phi_b, total, sign


def _prop2_checks(p: dict, eng: EngineConfig, with_profile: bool) -> list:
    n, m = p["n"], p["m"]
    data, sol, base, phi_b, total, sign = _prop2_bundle(p, eng)
    ts = sol.grid(200)
    out = []

    r1, r2 = residuals_reduced(data, sol, ts)
    out.append(ck.make_result("reduced-residuals",
                              np.maximum(np.abs(r1), np.abs(r2)), eng.tol_or(1e-10)))
    e3 = np.abs(residual_eq3(data, sol, ts))
    e4 = np.abs(residual_eq4(data, sol, ts))
    out.append(ck.make_result("eq3-eq4-residuals", np.maximum(e3, e4), eng.tol_or(1e-10)))

    pert = dataclasses.replace(data, mu=data.mu_effective + 0.1)
    d3 = np.abs(residual_eq3(pert, sol, ts))
    d4 = np.abs(residual_eq4(pert, sol, ts))
    out.append(ck.threshold_check("mu-detection", float(np.max(np.maximum(d3, d4))), 1e-3))

    out.append(ck.einstein_check(base, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                                 eng.fd, eng.seed, check_id="einstein-base"))
    out.append(ck.einstein_check(total, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                                 eng.fd, eng.seed, check_id="einstein-total"))

    pts = chart_samples(base.chart, eng.samples, eng.seed)
    res1, res2 = [], []
    for q in pts:
        H = curvature.hessian(phi_b, base, q, eng.fd)
        ric = curvature.ricci(base, q, eng.fd)
        G = base(q)
        w = phi_b(q)
        res1.append(float(np.max(np.abs((n - m) * H - (ric - data.rho * G) * w))))
        res2.append(abs(residual_eq2(data, base, phi_b, q, eng.fd)))
    out.append(ck.make_result("eq1-residual", res1, eng.tol_or(1e-4)))
    out.append(ck.make_result("eq2-residual", res2, eng.tol_or(1e-6)))

    out.append(ck.trace_identity_check(data, base, phi_b, eng.samples,
                                       eng.tol_or(1e-4), eng.fd, eng.seed))
    out.append(ck.combined_identity_check(data, base, phi_b, eng.samples,
                                          eng.tol_or(1e-4), eng.fd, eng.seed))

    if with_profile:
        profile_h = _prop2_profile_h(p, sol, base.chart, sign)
        full = rotational_immersion(profile_h, phi_b, n - m)
        out.append(ck.isometry_check(full, total, eng.samples,
                                     eng.tol_or(ck.ISOMETRY_TOL), eng.fd, eng.seed,
                                     check_id="rotational-isometry"))
        out.append(ck.gradient_bound_check(_with_last_coordinate(profile_h, phi_b),
                                           eng.samples, cfg=eng.fd, seed=eng.seed,
                                           check_id="gradient-bound-profile"))
        u_field, a_u = closed_form_u(data, p.get("shift", 0.0))
        s_pts = chart_samples(u_field.chart, 100, eng.seed)
        ures = [abs(u_field.grad(q)[0] ** 2 - 1.0 + (u_field(q) / a_u) ** 2)
                for q in s_pts]
        out.append(ck.make_result("u-residual", ures, eng.tol_or(1e-12), estimate=a_u))
        gres = []
        for q in pts:
            gn2 = curvature.gradient_norm_sq(phi_b, base, q, eng.fd)
            w = phi_b(q)
            gres.append(abs(gn2 - (1.0 - (w / a_u) ** 2)))
        out.append(ck.make_result("eq52-gradnorm", gres, eng.tol_or(1e-6)))
    return out


def _prop2_profile_h(p: dict, sol: WarpSolution, base_chart: Chart, sign: int) -> ImmersionMap:
    """Cone-like profile height map h(t, z) = |phi'(t)| g0(z), zero-padded to R^(m+1)."""
    n, m, rho = p["n"], p["m"], p["rho"]
    r_leaf = math.sqrt((n - 1) / rho)

    def fn(q):
        w1 = sign * float(sol.phi1(q[0]))
        pt = sphere_point(q[1:], m - 1, r_leaf)
        return np.concatenate([w1 * pt, [0.0]])

    return ImmersionMap(base_chart, m + 1, fn)


def _prop2_dump(p: dict, eng: EngineConfig):
    data, sol, base, phi_b, total, sign = _prop2_bundle(p, eng)
    phi_t = sol.as_scalar_field(total.chart, coord=0)
    rho = p["rho"]
    cols = [
        ("einstein-total", lambda q: _einstein_residual_at(total, q, rho, eng.fd)),
        ("reduced-residuals", lambda q: float(np.max(np.abs(
            np.asarray(residuals_reduced(data, sol, q[0])))))),
        ("warp_phi", lambda q: float(sol.phi(q[0]))),
        ("grad_phi_norm", lambda q: abs(float(sol.phi1(q[0])))),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(total, q, eng.fd)),
    ]
    return _dump_table(total.chart, cols, eng)


# ---------------------------------------------------------------------------
# scenario: trace/combined identity suite (global-result equations)
# ---------------------------------------------------------------------------


def _thm2_checks(p: dict, eng: EngineConfig) -> list:
    data, sol, base, phi_b, total, sign = _prop2_bundle(p, eng)
    out = [
        ck.trace_identity_check(data, base, phi_b, eng.samples, eng.tol_or(1e-3),
                                eng.fd, eng.seed),
        ck.combined_identity_check(data, base, phi_b, eng.samples, eng.tol_or(1e-3),
                                   eng.fd, eng.seed),
    ]
    u_field, a_u = closed_form_u(data, p["shift"])
    s_pts = chart_samples(u_field.chart, 100, eng.seed)
    ures = [abs(u_field.grad(q)[0] ** 2 - 1.0 + (u_field(q) / a_u) ** 2) for q in s_pts]
    out.append(ck.make_result("u-residual", ures, eng.tol_or(1e-12), estimate=a_u))

    pts = chart_samples(base.chart, eng.samples, eng.seed)
    gres = []
    for q in pts:
        gn2 = curvature.gradient_norm_sq(phi_b, base, q, eng.fd)
        w = phi_b(q)
        gres.append(abs(gn2 - (1.0 - (w / a_u) ** 2)))
    out.append(ck.make_result("eq52-gradnorm", gres, eng.tol_or(1e-6)))

    # sampled form of the scalar-curvature branch inequality S_L >= (2m-n) rho
    # (forced by |grad phi| <= 1); reports the smallest sampled slack
    n, m = p["n"], p["m"]
    slacks = [curvature.scalar_curvature(base, q, eng.fd)
              - (2 * m - n) * data.rho for q in pts]
    out.append(ck.make_result("scalar-lower-bound",
                              [max(0.0, -s) for s in slacks], eng.tol_or(1e-6),
                              estimate=min(slacks)))

    # constant-phi branch with eps = 0: the identity collapses to S_L = (2m-n) rho
    flat = flat_metric([f"w{i}" for i in range(1, m + 1)])
    one = ScalarField(flat.chart, lambda q: 1.0, grad=lambda q: np.zeros(m))
    d0 = EinsteinData(n=n, m=m, rho=0.0, eps=0, mu=0.0, s_l=0.0)
    out.append(ck.combined_identity_check(d0, flat, one, eng.samples, eng.tol_or(1e-4),
                                          eng.fd, eng.seed,
                                          check_id="combined-identity-constant-phi"))
    return out


def _thm2_dump(p: dict, eng: EngineConfig):
    return _prop2_dump(p, eng)


# ---------------------------------------------------------------------------
# scenario: warped-product representation of Euclidean space
# ---------------------------------------------------------------------------


def _warped_rep_build(p: dict):
    dv, ks = p["v_dim"], p["sphere_dim"]
    r = p["r"]
    names = tuple(f"v{i}" for i in range(1, dv + 1))
    lower = (-0.8,) * (dv - 1) + (p["v_lo"],)
    upper = (0.8,) * (dv - 1) + (p["v_hi"],)
    margins = (0.1,) * (dv - 1) + (min(0.15, 0.2 * (p["v_hi"] - p["v_lo"])),)
    v_chart = Chart(names, lower, upper, margins)
    q = np.zeros(dv + ks)
    q[dv - 1] = r
    rep = WarpedRepresentation(q=q, r=r, V_chart=v_chart, sphere_chart=sphere_chart(ks))
    psi = warped_representation(rep)

    def expected_fn(pt):
        out = np.zeros((dv + ks, dv + ks))
        out[:dv, :dv] = np.eye(dv)
        sigma = pt[dv - 1] / r
        out[dv:, dv:] = np.diag(sigma * sigma * sphere_diag(pt[dv:], ks, r))
        return out

    expected = MetricField(psi.chart, expected_fn)
    return rep, psi, expected


def _warped_rep_checks(p: dict, eng: EngineConfig) -> list:
    dv, ks, r = p["v_dim"], p["sphere_dim"], p["r"]
    rep, psi, expected = _warped_rep_build(p)
    out = [
        ck.isometry_check(psi, expected, eng.samples, eng.tol_or(ck.ISOMETRY_TOL),
                          eng.fd, eng.seed, check_id="isometry-psi"),
        ck.einstein_check(expected, eng.samples, eng.tol_or(ck.CURVATURE_TOL),
                          eng.fd, eng.seed, check_id="einstein-flat"),
    ]
    ys = chart_samples(rep.sphere_chart, eng.samples, eng.seed)
    res = []
    for y in ys:
        pt = np.concatenate([np.zeros(dv - 1), [r], y])
        target = np.zeros(dv + ks)
        target[dv - 1:] = sphere_point(y, ks, r)
        res.append(float(np.max(np.abs(psi(pt) - target))))
    out.append(ck.make_result("identity-at-q", res, eng.tol_or(1e-12)))
    return out


def _warped_rep_dump(p: dict, eng: EngineConfig):
    rep, psi, expected = _warped_rep_build(p)
    pull = pullback_field(psi, eng.fd)
    cols = [
        ("isometry-psi", lambda q: float(np.max(np.abs(pull.fn(q) - expected(q))))),
        ("einstein-flat", lambda q: _einstein_residual_at(expected, q, 0.0, eng.fd)),
        ("scalar_curvature", lambda q: curvature.scalar_curvature(expected, q, eng.fd)),
    ]
    return _dump_table(psi.chart, cols, eng)


# ---------------------------------------------------------------------------
# registry plumbing
# ---------------------------------------------------------------------------


def _einstein_residual_at(g: MetricField, q, rho: float, cfg: FDConfig) -> float:
    ric = curvature.ricci(g, q, cfg)
    G = g(q)
    return float(np.max(np.abs(ric - rho * G)) / (1.0 + abs(rho) * np.max(np.abs(G))))


def _dump_table(chart: Chart, cols, eng: EngineConfig):
    pts = chart_samples(chart, eng.samples, eng.seed)
    pts = pts[np.lexsort(pts.T[::-1])]
    header = list(chart.names)
    for name, _ in cols:
        new, k = name, 2
        while new in header:
            new = f"{name}_{k}"
            k += 1
        header.append(new)
    rows = []
    for q in pts:
        rows.append(list(q) + [float(fn(q)) for _, fn in cols])
    return header, np.asarray(rows)


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str
    defaults: dict
    checks_fn: Callable[[dict, EngineConfig], list]
    dump_fn: Callable[[dict, EngineConfig], tuple]
    validate_fn: Callable[[dict, bool], None]
    theorem_level: bool = False


def _validate_common(p: dict, sid: str):
    if "n" in p and not 2 <= p["n"] <= 9:
        raise InvalidParameter("n", f"total dimension must lie in [2, 9] for {sid}")


def _require(cond: bool, name: str, detail: str):
    if not cond:
        raise InvalidParameter(name, detail)


def _validate_spheres(p, relax):
    _validate_common(p, "spheres-product")
    _require(p["m"] >= 2, "m", "need m >= 2")
    _require(p["n"] - p["m"] >= 2, "n", "need n - m >= 2")
    _require(p["rho"] > 0, "rho", "product of spheres needs rho > 0")


def _validate_gs(p, relax):
    _validate_common(p, "gs-metric")
    _require(p["n"] >= 5, "n", "generalized-Schwarzschild metric needs n >= 5")
    _require(p["c"] < 0, "c", "need c < 0")
    _require(0 < p["t_lo"] < p["t_hi"] <= p["t_table"], "t_lo",
             "need 0 < t_lo < t_hi <= t_table")
    _require(0 < p["ode_step"] <= p["t_table"] / 10.0, "ode_step",
             "need 0 < ode_step <= t_table/10")


def _validate_theorem_dims(p, relax, sid):
    _validate_common(p, sid)
    if not relax:
        _require(p["m"] >= 5, "m",
                 f"{sid} needs m >= 5: with m = 4 the leaf factor is a 3-dimensional "
                 "Einstein manifold and the splitting degenerates to constant "
                 "curvature (pass --relax to explore below the threshold)")
        _require(p["n"] >= p["m"] + 3, "n",
                 f"{sid} needs n >= m + 3 (pass --relax to explore below the threshold)")
    else:
        _require(p["m"] >= 2, "m", "need m >= 2")
        _require(p["n"] >= p["m"] + 2, "n", "need n >= m + 2")


def _validate_flat_cone(p, relax):
    _validate_theorem_dims(p, relax, "flat-cone")
    _require(0 < p["c"] <= 1, "c", "profile needs gradient constant c in (0, 1]")
    _require(0 < p["s_lo"] < p["s_hi"], "s_lo", "need 0 < s_lo < s_hi")


def _validate_cylinder(p, relax):
    _validate_theorem_dims(p, relax, "cylinder")
    _require(p["m"] >= 3, "m", "torus x box base needs m >= 3")
    _require(p["r1"] > 0 and p["r2"] > 0, "r1", "circle radii must be positive")


def _validate_prop2(sign):
    def check(p, relax):
        _validate_common(p, f"prop2-{sign}")
        _require(p["n"] >= p["m"] + 2, "n", "double-Einstein reduction needs n >= m + 2")
        _require(p["m"] >= 3, "m", "leaf factor needs m >= 3")
        if sign == "zero":
            _require(p["rho"] == 0.0, "rho", "this scenario fixes rho = 0")
        elif sign == "positive":
            _require(p["rho"] > 0.0, "rho", "need rho > 0")
            _require(int(p["eps"]) == 1, "eps", "rho > 0 forces eps = 1")
        else:
            _require(p["rho"] < 0.0, "rho", "need rho < 0")
        _require(int(p["eps"]) in (-1, 0, 1), "eps", "eps must be -1, 0 or +1")

    return check


def _validate_thm2(p, relax):
    _validate_theorem_dims(p, relax, "thm2-identities")
    _require(p["rho"] > 0.0, "rho", "the identity suite uses the rho > 0 closed form")


def _validate_warped_rep(p, relax):
    _require(p["v_dim"] >= 1, "v_dim", "need v_dim >= 1")
    _require(p["sphere_dim"] >= 1, "sphere_dim", "need sphere_dim >= 1")
    _require(p["v_dim"] + p["sphere_dim"] <= 9, "v_dim", "total dimension capped at 9")
    _require(p["r"] > 0, "r", "sphere radius must be positive")
    _require(0 < p["v_lo"] < p["r"] < p["v_hi"], "r",
             "need 0 < v_lo < r < v_hi so q lies in the sampled base")


_SQRT2 = math.sqrt(2.0)

SCENARIOS: dict[str, Scenario] = {}


def _register(s: Scenario):
    if s.id in SCENARIOS:
        raise ValueError(f"duplicate scenario id {s.id}")
    SCENARIOS[s.id] = s


_register(Scenario(
    id="spheres-product",
    description=("Product of two round spheres with radii sqrt((m-1)/rho) and "
                 "sqrt((n-m-1)/rho): Einstein but neither flat nor a cylinder."),
    defaults={"n": 8, "m": 5, "rho": 4.0},
    checks_fn=_spheres_product_checks,
    dump_fn=_spheres_product_dump,
    validate_fn=_validate_spheres,
))

_register(Scenario(
    id="gs-metric",
    description=("Ricci-flat generalized-Schwarzschild warped metric "
                 "dt^2 + phi'^2 dth^2 + phi^2 g_S with phi'^2 = 1 + c/phi^(n-3), "
                 "plus its rotational immersion."),
    defaults={"n": 5, "c": -1.0, "t_lo": 0.5, "t_hi": 3.0, "t_table": 5.0,
              "ode_step": 1e-3},
    checks_fn=_gs_checks,
    dump_fn=_gs_dump,
    validate_fn=_validate_gs,
))

_register(Scenario(
    id="flat-cone",
    description=("Flat product of an (m-1)-plane with a cone over a sphere of "
                 "radius 1/sqrt(c); realizes the constant-gradient splitting "
                 "f0 x j. The measured |grad phi| equals sqrt(c) for the fiber "
                 "radius 1/sqrt(c); the checks verify the constancy and record "
                 "the constant rather than assuming which role c plays."),
    defaults={"n": 8, "m": 5, "c": 0.5, "s_lo": 0.5, "s_hi": 2.5},
    checks_fn=_flat_cone_checks,
    dump_fn=_flat_cone_dump,
    validate_fn=_validate_flat_cone,
    theorem_level=True,
))

_register(Scenario(
    id="cylinder",
    description="Cylinder over a flat torus cross a Euclidean factor (f0 x id).",
    defaults={"n": 8, "m": 5, "r1": 1.0, "r2": 1.0},
    checks_fn=_cylinder_checks,
    dump_fn=_cylinder_dump,
    validate_fn=_validate_cylinder,
    theorem_level=True,
))

_register(Scenario(
    id="prop2-zero",
    description="Closed form phi(t) = t (rho = 0, eps = 1) with the full warped Einstein check.",
    defaults={"n": 8, "m": 5, "rho": 0.0, "eps": 1},
    checks_fn=lambda p, e: _prop2_checks(p, e, with_profile=False),
    dump_fn=_prop2_dump,
    validate_fn=_validate_prop2("zero"),
))

_register(Scenario(
    id="prop2-positive",
    description=("Closed form phi = a cos + b sin with a^2 + b^2 = (n-1)/rho "
                 "(rho > 0) over a sphere leaf, with rotational profile."),
    defaults={"n": 8, "m": 5, "rho": 7.0, "eps": 1, "a": 1.0, "b": 0.0, "shift": 0.0},
    checks_fn=lambda p, e: _prop2_checks(p, e, with_profile=True),
    dump_fn=_prop2_dump,
    validate_fn=_validate_prop2("positive"),
))

_register(Scenario(
    id="prop2-negative",
    description=("Closed form phi = a cosh + b sinh with a^2 - b^2 = eps (n-1)/rho "
                 "(rho < 0). No rotational profile: |phi'| exceeds 1, which is "
                 "exactly why these immersions cannot exist."),
    defaults={"n": 8, "m": 5, "rho": -7.0, "eps": -1, "a": _SQRT2, "b": 1.0},
    checks_fn=lambda p, e: _prop2_checks(p, e, with_profile=False),
    dump_fn=_prop2_dump,
    validate_fn=_validate_prop2("negative"),
))

_register(Scenario(
    id="thm2-identities",
    description=("Scalar identity suite: trace identity, combined identity, the "
                 "geodesic profile u = a sin(shift + s/a), and the constant-phi "
                 "eps = 0 degeneration."),
    defaults={"n": 8, "m": 5, "rho": 7.0, "eps": 1, "a": 1.0, "b": 0.0, "shift": 0.0},
    checks_fn=_thm2_checks,
    dump_fn=_thm2_dump,
    validate_fn=_validate_thm2,
    theorem_level=True,
))

_register(Scenario(
    id="warped-representation",
    description=("Euclidean space as a warped product over a base slice: "
                 "psi(p0, p1) = p0 + sigma(p0)(p1 - q), checked to be an isometry "
                 "onto the flat metric."),
    defaults={"v_dim": 1, "sphere_dim": 1, "r": 1.0, "v_lo": 0.3, "v_hi": 3.0},
    checks_fn=_warped_rep_checks,
    dump_fn=_warped_rep_dump,
    validate_fn=_validate_warped_rep,
))


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def list_scenarios() -> list[dict]:
    return [
        {"id": s.id, "description": s.description, "parameters": dict(s.defaults)}
        for s in SCENARIOS.values()
    ]


def _resolve_params(scenario: Scenario, overrides: Optional[dict], relax: bool) -> dict:
    params = dict(scenario.defaults)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise InvalidParameter(
                key, f"unknown parameter for {scenario.id}; "
                     f"accepted: {', '.join(sorted(params))}")
        default = params[key]
        try:
            if isinstance(default, int):
                if not float(value).is_integer():
                    raise InvalidParameter(key, f"{value!r} is not an integer")
                params[key] = int(float(value))
            else:
                params[key] = float(value)
        except (TypeError, ValueError):
            raise InvalidParameter(key, f"cannot coerce {value!r} to {type(default).__name__}")
    scenario.validate_fn(params, relax)
    return params


def _get_scenario(scenario_id: str) -> Scenario:
    if scenario_id not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise UnknownScenario(f"unknown scenario {scenario_id!r}; known: {known}")
    return SCENARIOS[scenario_id]


def run_scenario(scenario_id: str, overrides: Optional[dict] = None,
                 out_path=None, engine: Optional[EngineConfig] = None,
                 relax: bool = False) -> ck.VerificationReport:
    """Build a scenario, run its declared checks, optionally write the report."""
    scenario = _get_scenario(scenario_id)
    eng = engine or EngineConfig()
    params = _resolve_params(scenario, overrides, relax)
    results = scenario.checks_fn(params, eng)
    report = ck.VerificationReport(
        scenario_id=scenario.id,
        parameters=params,
        checks=results,
        overall_passed=all(c.passed for c in results),
        timestamp=_timestamp(),
        engine_config=eng.to_dict(),
    )
    if out_path is not None:
        write_report(report, out_path)
    return report


def report_text(report: ck.VerificationReport) -> str:
    import json

    return json.dumps(report.to_dict(), indent=2) + "\n"


def write_report(report: ck.VerificationReport, path) -> None:
    _atomic_write(path, report_text(report))


def dump_samples(scenario_id: str, overrides: Optional[dict] = None,
                 out_path=None, engine: Optional[EngineConfig] = None,
                 relax: bool = False) -> tuple[list[str], np.ndarray]:
    """Per-sample rows (coordinates, per-check residuals, phi, |grad phi|, scalar)."""
    scenario = _get_scenario(scenario_id)
    eng = engine or EngineConfig()
    params = _resolve_params(scenario, overrides, relax)
    header, rows = scenario.dump_fn(params, eng)
    if out_path is not None:
        _atomic_write(out_path, dump_text(header, rows))
    return header, rows


def dump_text(header: list[str], rows: np.ndarray, delimiter: str = ",") -> str:
    lines = [delimiter.join(header)]
    for row in rows:
        lines.append(delimiter.join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _atomic_write(path, text: str) -> None:
    import tempfile

    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".einwarp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
