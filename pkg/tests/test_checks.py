"""Verification checks: residual reduction, estimation, and determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from einwarp.checks import (
    VerificationReport,
    constancy_check,
    einstein_check,
    gradient_bound_check,
    isometry_check,
    make_result,
    threshold_check,
)
from einwarp.geometry import (
    FDConfig,
    ScalarField,
    box_chart,
    euclidean_metric,
    interval_chart,
)
from einwarp.immersions import ImmersionMap
from einwarp.library import sphere_metric

CFG = FDConfig()


class TestMakeResult:
    @given(st.lists(st.floats(0, 100), min_size=1, max_size=20),
           st.floats(1e-12, 100))
    @settings(max_examples=60, deadline=None)
    def test_passed_iff_max_below_tolerance(self, residuals, tol):
        r = make_result("x", residuals, tol)
        assert r.passed == (r.max_residual <= r.tolerance)
        assert r.max_residual == max(residuals)
        assert r.samples_used == len(residuals)

    def test_threshold_semantics(self):
        assert threshold_check("spread", 0.5, minimum=0.01).passed
        bad = threshold_check("spread", 0.005, minimum=0.01)
        assert not bad.passed
        assert bad.max_residual == pytest.approx(0.005)


class TestEinsteinCheck:
    def test_euclidean_five_space(self):
        g = euclidean_metric(box_chart([f"x{i}" for i in range(5)], -1, 1, margin=0.1))
        r = einstein_check(g, samples=16, tol=1e-3, cfg=CFG)
        assert r.passed
        assert abs(r.estimated_constant) < 1e-7
        assert r.max_residual <= 1e-7

    def test_recovers_constant_on_sphere(self):
        # invariant: recovered rho within 10x the curvature tolerance
        g = sphere_metric(3, 1.0)
        r = einstein_check(g, samples=12, tol=1e-3, cfg=CFG)
        assert r.passed
        assert abs(r.estimated_constant - 2.0) < 10 * 1e-3

    def test_explicit_sample_points_accepted(self):
        g = sphere_metric(2)
        pts = np.array([[1.0, 1.0], [1.3, 2.0]])
        r = einstein_check(g, samples=pts, tol=1e-3, cfg=CFG)
        assert r.samples_used == 2
        assert r.passed


class TestIsometryCheck:
    def test_identity_immersion(self):
        chart = box_chart(["x", "y"], -1, 1, margin=0.1)
        f = ImmersionMap(chart, 2, lambda p: p.copy())
        r = isometry_check(f, euclidean_metric(chart), samples=12, cfg=CFG)
        assert r.passed
        assert r.max_residual <= 1e-10


class TestConstancyCheck:
    def test_constant_field(self):
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        r = constancy_check(ScalarField(chart, lambda p: 2.5), samples=16)
        assert r.passed
        assert r.max_residual == 0.0
        assert r.estimated_constant == 2.5

    def test_detects_nonconstant_field(self):
        chart = interval_chart("t", 1.0, 2.0, margin=0.0)
        r = constancy_check(ScalarField(chart, lambda p: p[0] ** 2), samples=64)
        assert not r.passed
        assert r.max_residual >= 0.5


class TestIdentityChecks:
    def test_trace_identity_constant_phi_flat_base(self):
        # constant phi with S_L = m rho = 0: both sides of the trace identity vanish
        from einwarp.checks import trace_identity_check
        from einwarp.warp import EinsteinData
        chart = box_chart([f"x{i}" for i in range(5)], -1, 1, margin=0.1)
        g = euclidean_metric(chart)
        phi = ScalarField(chart, lambda p: 2.0)
        data = EinsteinData(n=8, m=5, rho=0.0, eps=0, s_l=0.0)
        r = trace_identity_check(data, g, phi, samples=8, tol=1e-4, cfg=CFG)
        assert r.passed
        assert r.max_residual < 1e-8


class TestGradientBoundCheck:
    def test_unit_gradient_profile(self):
        # h independent of t, phi = t: |grad phi| = 1 exactly
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        f = ImmersionMap(chart, 2, lambda p: np.array([4.0, p[0]]))
        r = gradient_bound_check(f, samples=10, cfg=CFG)
        assert r.passed
        assert r.estimated_constant == pytest.approx(1.0, abs=1e-9)

    def test_constant_phi(self):
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        f = ImmersionMap(chart, 2, lambda p: np.array([p[0], 7.0]))
        r = gradient_bound_check(f, samples=10, cfg=CFG)
        assert r.passed
        assert r.estimated_constant == pytest.approx(0.0, abs=1e-12)

    def test_shallow_profile(self):
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        s = 1.0 / math.sqrt(2.0)
        f = ImmersionMap(chart, 2, lambda p: np.array([s * p[0], s * p[0]]))
        r = gradient_bound_check(f, samples=10, cfg=CFG)
        assert r.passed
        assert r.estimated_constant == pytest.approx(s, abs=1e-9)


class TestDeterminism:
    def test_bit_identical_results_for_same_seed(self):
        g = sphere_metric(2)
        a = einstein_check(g, samples=8, tol=1e-3, cfg=CFG, seed=5)
        b = einstein_check(g, samples=8, tol=1e-3, cfg=CFG, seed=5)
        assert a == b

    def test_seed_changes_samples(self):
        g = sphere_metric(2)
        a = einstein_check(g, samples=8, tol=1e-3, cfg=CFG, seed=5)
        b = einstein_check(g, samples=8, tol=1e-3, cfg=CFG, seed=6)
        assert a.max_residual != b.max_residual


class TestReport:
    def test_overall_passed_definition(self):
        ok = make_result("a", [0.0], 1e-6)
        bad = make_result("b", [1.0], 1e-6)
        rep = VerificationReport("s", {}, [ok, bad], all(c.passed for c in [ok, bad]),
                                 "1970-01-01T00:00:00+00:00", {})
        assert rep.overall_passed is False
        d = rep.to_dict()
        assert list(d.keys()) == ["scenario_id", "parameters", "checks",
                                  "overall_passed", "timestamp", "engine_config"]
        assert list(d["checks"][0].keys()) == [
            "check_id", "max_residual", "mean_residual", "estimated_constant",
            "tolerance", "passed", "samples_used"]
