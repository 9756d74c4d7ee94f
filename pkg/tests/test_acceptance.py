"""Acceptance suite: every quantitatively stated claim at its stated tolerance.

Each criterion prints one pass/fail line (run with `pytest -s` to see them all)
and enforces its runtime budget where one is stated.
"""

import dataclasses
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from einwarp.checks import isometry_check
from einwarp.curvature import ricci
from einwarp.geometry import FDConfig, interval_chart
from einwarp.immersions import (
    WarpedRepresentation,
    cone_map,
    cylinder_immersion,
    sphere_inclusion,
    warped_representation,
)
from einwarp.library import sphere_metric
from einwarp.sampling import chart_samples
from einwarp.scenarios import EngineConfig, run_scenario
from einwarp.warp import (
    EinsteinData,
    closed_form_u,
    closed_form_warp,
    gs_warp,
    residual_eq3,
    residual_eq4,
    residuals_reduced,
)

CFG = FDConfig()


def report_line(num: int, ok: bool, label: str, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} [{status}] {label}: {detail}", flush=True)


def check_map(report):
    return {c.check_id: c for c in report.checks}


def test_criterion_1_sphere_curvature_oracle():
    """Ricci of S^k(r) equals ((k-1)/r^2) g to 1e-4; scalar to 1e-3 relative."""
    t0 = time.monotonic()
    worst_ric, worst_scal = 0.0, 0.0
    for k in range(2, 7):
        for r in (1.0, 1.0 / math.sqrt(2.0), 2.0):
            g = sphere_metric(k, r)
            lam = (k - 1) / r**2
            for p in chart_samples(g.chart, 3, seed=k):
                ric = ricci(g, p, CFG)
                expect = lam * g(p)
                diag = np.abs(np.diag(ric - expect)) / np.abs(np.diag(expect))
                off = np.abs(ric - expect) / np.max(np.abs(expect))
                np.fill_diagonal(off, 0.0)
                worst_ric = max(worst_ric, diag.max(), off.max())
                ginv = np.linalg.inv(g(p))
                scal = float(np.einsum("ij,ij->", ginv, ric))
                worst_scal = max(worst_scal, abs(scal - k * (k - 1) / r**2)
                                 / (k * (k - 1) / r**2))
    elapsed = time.monotonic() - t0
    ok = worst_ric <= 1e-4 and worst_scal <= 1e-3 and elapsed <= 10.0
    report_line(1, ok, "sphere curvature oracle",
                f"max Ricci rel err {worst_ric:.2e} (tol 1e-4), "
                f"max scalar rel err {worst_scal:.2e} (tol 1e-3), {elapsed:.1f}s")
    assert worst_ric <= 1e-4
    assert worst_scal <= 1e-3
    assert elapsed <= 10.0


def test_criterion_2_product_of_spheres():
    """S^5(1) x S^3(1/sqrt2) is Einstein with rho = 4 +- 1e-3."""
    t0 = time.monotonic()
    report = run_scenario("spheres-product", {"n": 8, "m": 5, "rho": 4.0},
                          engine=EngineConfig(samples=32))
    elapsed = time.monotonic() - t0
    c = check_map(report)["einstein-product"]
    ok = c.passed and abs(c.estimated_constant - 4.0) <= 1e-3 and elapsed <= 20.0
    report_line(2, ok, "product of spheres",
                f"rho_hat = {c.estimated_constant:.6f} (want 4 +- 1e-3), "
                f"residual {c.max_residual:.2e}, {elapsed:.1f}s")
    assert c.passed
    assert abs(c.estimated_constant - 4.0) <= 1e-3
    assert elapsed <= 20.0


def test_criterion_3_gs_metric():
    """GS n=5, c=-1: closed form, first integral, Ricci-flat, non-flat."""
    t0 = time.monotonic()
    sol = gs_warp(5, -1.0, t_max=5.0)
    ts = np.linspace(0.0, 5.0, 1001)
    err_cf = float(np.max(np.abs(np.asarray(sol.phi(ts)) - np.sqrt(1.0 + ts**2))))
    report = run_scenario("gs-metric", engine=EngineConfig(samples=32))
    elapsed = time.monotonic() - t0
    c = check_map(report)
    fi = c["gs-first-integral"]
    ein = c["einstein-gs"]
    spread = c["sectional-spread"]
    ok = (err_cf <= 1e-7 and fi.passed and ein.passed
          and abs(ein.estimated_constant) <= 1e-3
          and spread.passed and spread.estimated_constant > 1e-2
          and elapsed <= 30.0)
    report_line(3, ok, "generalized-Schwarzschild metric",
                f"closed-form err {err_cf:.2e} (tol 1e-7), "
                f"first-integral {fi.max_residual:.2e} (tol 1e-8), "
                f"rho_hat {ein.estimated_constant:.2e} (tol 1e-3), "
                f"sectional spread {spread.estimated_constant:.3f} (> 1e-2), "
                f"{elapsed:.1f}s")
    assert err_cf <= 1e-7
    assert fi.passed and fi.max_residual <= 1e-8
    assert ein.passed and abs(ein.estimated_constant) <= 1e-3
    assert spread.passed and spread.estimated_constant > 1e-2
    assert elapsed <= 30.0


def _prop2_cases():
    # two parameter choices per closed-form case
    zero_a = EinsteinData.double_einstein(8, 5, 0.0, 1)
    zero_b = EinsteinData.double_einstein(9, 6, 0.0, 1)
    pos = EinsteinData.double_einstein(8, 5, 7.0, 1)
    neg_hyp = EinsteinData.double_einstein(8, 5, -7.0, -1)
    neg_sph = EinsteinData.double_einstein(8, 5, -7.0, 1)
    half = math.sqrt(0.5)
    return [
        ("zero/a", zero_a, closed_form_warp(zero_a)),
        ("zero/b", zero_b, closed_form_warp(zero_b)),
        ("positive/a", pos, closed_form_warp(pos, a=1.0, b=0.0)),
        ("positive/b", pos, closed_form_warp(pos, a=half, b=half)),
        ("negative/a", neg_hyp, closed_form_warp(neg_hyp, a=math.sqrt(2.0), b=1.0)),
        ("negative/b", neg_sph, closed_form_warp(neg_sph, a=0.0, b=1.0)),
    ]


def test_criterion_4_closed_form_residuals():
    """All four one-variable residuals vanish to 1e-10 at 200 sampled t."""
    t0 = time.monotonic()
    worst, worst_case = 0.0, ""
    for label, data, sol in _prop2_cases():
        ts = sol.grid(200)
        r1, r2 = residuals_reduced(data, sol, ts)
        e3 = residual_eq3(data, sol, ts)
        e4 = residual_eq4(data, sol, ts)
        m = max(np.max(np.abs(r)) for r in (r1, r2, e3, e4))
        if m > worst:
            worst, worst_case = m, label
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-10 and elapsed <= 5.0
    report_line(4, ok, "closed-form warp residuals",
                f"max residual {worst:.2e} at case {worst_case} (tol 1e-10), "
                f"{elapsed:.1f}s")
    assert worst <= 1e-10
    assert elapsed <= 5.0


def test_criterion_5_relation_detection():
    """Perturbing mu by 0.1 lifts the residuals above 1e-3 on the same samples."""
    weakest = math.inf
    for label, data, sol in _prop2_cases():
        ts = sol.grid(200)
        pert = dataclasses.replace(data, mu=data.mu_effective + 0.1)
        detected = max(np.max(np.abs(residual_eq3(pert, sol, ts))),
                       np.max(np.abs(residual_eq4(pert, sol, ts))))
        weakest = min(weakest, detected)
    ok = weakest >= 1e-3
    report_line(5, ok, "relation detection",
                f"weakest perturbed residual {weakest:.2e} (must be >= 1e-3)")
    assert weakest >= 1e-3


def test_criterion_6_isometry_suite():
    """Five pullbacks match their intrinsic metrics to 1e-6 at 100 points."""
    t0 = time.monotonic()
    results = []

    f_sph = sphere_inclusion(2, 1.0)
    results.append(isometry_check(f_sph, sphere_metric(2, 1.0), samples=100,
                                  cfg=CFG, check_id="sphere-inclusion"))

    from einwarp.geometry import MetricField, constant_metric

    cone1 = cone_map(sphere_inclusion(1, 1.0), (0.5, 3.0))
    g_cone1 = MetricField(cone1.chart, lambda p: np.diag([1.0, p[0] ** 2]))
    results.append(isometry_check(cone1, g_cone1, samples=100, cfg=CFG,
                                  check_id="cone-over-circle"))

    cone2 = cone_map(sphere_inclusion(2, 1.0), (0.5, 2.5))
    g_cone2 = MetricField(
        cone2.chart,
        lambda p: np.diag([1.0, p[0] ** 2, p[0] ** 2 * math.sin(p[1]) ** 2]))
    results.append(isometry_check(cone2, g_cone2, samples=100, cfg=CFG,
                                  check_id="cone-over-two-sphere"))

    cyl = cylinder_immersion(sphere_inclusion(1, 1.0), 1)
    results.append(isometry_check(cyl, constant_metric(cyl.chart, np.eye(2)),
                                  samples=100, cfg=CFG, check_id="cylinder"))

    rep = WarpedRepresentation(q=np.array([1.0, 0.0]), r=1.0,
                               V_chart=interval_chart("v1", 0.3, 3.0, margin=0.15),
                               sphere_chart=sphere_inclusion(1).chart)
    psi = warped_representation(rep)
    g_psi = MetricField(psi.chart, lambda p: np.diag([1.0, p[0] ** 2]))
    results.append(isometry_check(psi, g_psi, samples=100, cfg=CFG,
                                  check_id="warped-representation"))

    # rotational immersion over the isometric cosine profile
    from einwarp.immersions import rotational_immersion
    from einwarp.scenarios import _prop2_bundle, _prop2_profile_h

    params = {"n": 8, "m": 5, "rho": 7.0, "eps": 1, "a": 1.0, "b": 0.0}
    data, sol, base, phi_b, total, sign = _prop2_bundle(params, EngineConfig())
    profile_h = _prop2_profile_h(params, sol, base.chart, sign)
    full = rotational_immersion(profile_h, phi_b, 3)
    results.append(isometry_check(full, total, samples=100, cfg=CFG,
                                  check_id="rotational-isometry"))

    elapsed = time.monotonic() - t0
    worst = max(r.max_residual for r in results)
    ok = all(r.passed and r.max_residual <= 1e-6 for r in results) and elapsed <= 20.0
    detail = ", ".join(f"{r.check_id}={r.max_residual:.1e}" for r in results)
    report_line(6, ok, "isometry suite", f"{detail} (tol 1e-6 each), {elapsed:.1f}s")
    assert worst <= 1e-6
    assert elapsed <= 20.0


def test_criterion_7_identity_suite():
    """Trace/combined identities to 1e-3 on double-Einstein scenarios; u to 1e-12."""
    worst_trace, worst_comb = 0.0, 0.0
    for sid in ("prop2-zero", "prop2-positive", "prop2-negative"):
        report = run_scenario(sid, engine=EngineConfig(samples=24))
        c = check_map(report)
        worst_trace = max(worst_trace, c["trace-identity"].max_residual)
        worst_comb = max(worst_comb, c["combined-identity"].max_residual)

    data = EinsteinData.double_einstein(8, 5, 7.0, 1)
    u, a = closed_form_u(data, t0_shift=0.2)
    worst_u = 0.0
    for s in chart_samples(u.chart, 100, seed=0):
        du = u.grad(s)[0]
        worst_u = max(worst_u, abs(du**2 - (1.0 - (u(s) / a) ** 2)))

    ok = worst_trace <= 1e-3 and worst_comb <= 1e-3 and worst_u <= 1e-12
    report_line(7, ok, "identity suite",
                f"trace {worst_trace:.2e}, combined {worst_comb:.2e} (tol 1e-3), "
                f"geodesic profile {worst_u:.2e} (tol 1e-12)")
    assert worst_trace <= 1e-3
    assert worst_comb <= 1e-3
    assert worst_u <= 1e-12


def test_criterion_8_gradient_bound():
    """Every rotational profile has |grad phi| <= 1 + 1e-8; cone gradient constant."""
    worst_excess = 0.0
    for sid in ("gs-metric", "prop2-positive", "flat-cone"):
        report = run_scenario(sid, engine=EngineConfig(samples=32))
        for c in report.checks:
            if "gradient-bound" in c.check_id:
                worst_excess = max(worst_excess, c.max_residual)
                assert c.passed, f"{sid}:{c.check_id}"
        if sid == "flat-cone":
            const = check_map(report)["grad-phi-constancy"]
            assert const.passed and const.max_residual <= 1e-8
            const_resid = const.max_residual
            const_val = const.estimated_constant
    ok = worst_excess <= 1e-8
    report_line(8, ok, "gradient bound",
                f"max excess over 1 is {worst_excess:.2e} (tol 1e-8); flat-cone "
                f"|grad phi| = {const_val:.6f} constant to {const_resid:.2e}")
    assert worst_excess <= 1e-8


def test_criterion_9_determinism(tmp_path):
    """Two CLI runs with identical flags produce byte-identical reports."""
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        proc = subprocess.run(
            [sys.executable, "-m", "einwarp.cli", "--scenario", "gs-metric",
             "--samples", "16", "--seed", "7", "--report", str(p)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    report_line(9, identical, "determinism",
                f"two gs-metric reports byte-identical: {identical}")
    assert identical
    assert json.loads(paths[0].read_text())["overall_passed"] is True
