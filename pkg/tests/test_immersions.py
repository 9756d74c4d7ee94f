"""Immersion builders and first-fundamental-form pullbacks."""

import math

import numpy as np
import pytest

from einwarp.curvature import ricci, scalar_curvature
from einwarp.errors import NonPositiveSigma, RankDeficient
from einwarp.geometry import (
    FDConfig,
    Chart,
    MetricField,
    ScalarField,
    box_chart,
    interval_chart,
)
from einwarp.immersions import (
    ImmersionMap,
    WarpedRepresentation,
    cone_map,
    cylinder_immersion,
    jacobian,
    product_immersion,
    pullback_field,
    pullback_metric,
    rotational_immersion,
    sphere_inclusion,
    warped_representation,
)
from einwarp.library import sphere_diag, sphere_metric
from einwarp.sampling import chart_samples
from einwarp.warp import warped_metric

CFG = FDConfig()


def identity_map(dim: int) -> ImmersionMap:
    chart = box_chart([f"x{i}" for i in range(dim)], -1.0, 1.0, margin=0.1)
    return ImmersionMap(chart, dim, lambda p: p.copy())


class TestSphereInclusion:
    def test_circle_convention(self):
        f = sphere_inclusion(1, 1.0)
        np.testing.assert_allclose(f((0.0,)), [1.0, 0.0], atol=1e-15)

    def test_norm_constraint(self):
        f = sphere_inclusion(2, 2.0)
        for p in chart_samples(f.chart, 100, seed=1):
            assert np.linalg.norm(f(p)) == pytest.approx(2.0, abs=1e-12)

    def test_pullback_is_round_metric(self):
        f = sphere_inclusion(2, 1.0)
        for p in chart_samples(f.chart, 20, seed=2):
            expected = np.diag([1.0, math.sin(p[0]) ** 2])
            np.testing.assert_allclose(pullback_metric(f, p, CFG), expected, atol=1e-7)

    def test_pullback_matches_sphere_metric_field(self):
        k, r = 3, 1.7
        f = sphere_inclusion(k, r)
        g = sphere_metric(k, r)
        for p in chart_samples(f.chart, 10, seed=3):
            np.testing.assert_allclose(pullback_metric(f, p, CFG), g(p),
                                       atol=1e-7 * r * r)


class TestPullback:
    def test_identity_map(self):
        f = identity_map(3)
        np.testing.assert_allclose(pullback_metric(f, (0.1, 0.2, 0.3), CFG),
                                   np.eye(3), atol=1e-10)

    def test_rank_deficient_raises(self):
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        f = ImmersionMap(chart, 2, lambda p: np.array([1.0, 2.0]))
        with pytest.raises(RankDeficient):
            pullback_metric(f, (0.5,), CFG)


class TestCone:
    def test_over_unit_circle_is_flat_polar(self):
        cone = cone_map(sphere_inclusion(1, 1.0), (0.5, 3.0))
        for p in chart_samples(cone.chart, 20, seed=4):
            expected = np.diag([1.0, p[0] ** 2])
            np.testing.assert_allclose(pullback_metric(cone, p, CFG), expected,
                                       atol=1e-7)

    def test_over_unit_two_sphere_is_flat(self):
        cone = cone_map(sphere_inclusion(2, 1.0), (0.5, 2.5))
        g = pullback_field(cone, CFG)
        p = chart_samples(cone.chart, 1, seed=5)[0]
        assert abs(scalar_curvature(g, p, CFG)) < 1e-4

    def test_scaled_fiber_keeps_arclength_normalization(self):
        # fiber S^2(1/sqrt(c)): pullback = ds^2 + s^2 * (unit round), flat
        c = 2.0
        cone = cone_map(sphere_inclusion(2, 1.0 / math.sqrt(c)), (0.5, 2.5))
        for p in chart_samples(cone.chart, 10, seed=6):
            s, th = p[0], p[1]
            expected = np.diag([1.0, s * s, s * s * math.sin(th) ** 2])
            np.testing.assert_allclose(pullback_metric(cone, p, CFG), expected,
                                       atol=1e-7 * max(1.0, s * s))

    def test_rejects_interval_touching_zero(self):
        with pytest.raises(ValueError):
            cone_map(sphere_inclusion(1, 1.0), (0.0, 1.0))


class TestCylinder:
    def test_over_identity_interval(self):
        f0 = ImmersionMap(interval_chart("u", 0.0, 1.0, margin=0.1), 1,
                          lambda p: p.copy())
        cyl = cylinder_immersion(f0, 1)
        np.testing.assert_allclose(pullback_metric(cyl, (0.5, 0.2), CFG),
                                   np.eye(2), atol=1e-10)

    def test_over_unit_circle(self):
        cyl = cylinder_immersion(sphere_inclusion(1, 1.0), 1)
        for p in chart_samples(cyl.chart, 10, seed=7):
            np.testing.assert_allclose(pullback_metric(cyl, p, CFG), np.eye(2),
                                       atol=1e-8)

    def test_flat_factor_preserves_ricci_flatness(self):
        torus = product_immersion(sphere_inclusion(1, 1.0), sphere_inclusion(1, 2.0))
        cyl = cylinder_immersion(torus, 1)
        g = pullback_field(cyl, CFG)
        p = chart_samples(cyl.chart, 1, seed=8)[0]
        assert np.max(np.abs(ricci(g, p, CFG))) < 1e-5

    def test_jacobian_blocks_orthogonal(self):
        cyl = cylinder_immersion(sphere_inclusion(1, 1.0), 2)
        for p in chart_samples(cyl.chart, 10, seed=9):
            J = jacobian(cyl, p, CFG)
            cross = J[:, :1].T @ J[:, 1:]
            assert np.max(np.abs(cross)) < 1e-12


class TestProduct:
    def test_clifford_torus_flat(self):
        torus = product_immersion(sphere_inclusion(1, 1.0), sphere_inclusion(1, 1.0))
        g = pullback_field(torus, CFG)
        p = chart_samples(torus.chart, 1, seed=10)[0]
        np.testing.assert_allclose(pullback_metric(torus, p, CFG), np.eye(2),
                                   atol=1e-8)
        assert np.max(np.abs(ricci(g, p, CFG))) < 1e-5

    def test_product_with_point_equals_single_factor(self):
        f = sphere_inclusion(2, 1.0)
        g = product_immersion(f, np.array([3.0, -1.0]))
        p = chart_samples(f.chart, 3, seed=11)
        for q in p:
            np.testing.assert_array_equal(g(q)[:3], f(q))
            np.testing.assert_allclose(pullback_metric(g, q, CFG),
                                       pullback_metric(f, q, CFG), atol=1e-12)


class TestRotational:
    def test_constant_profile_gives_circle(self):
        chart = interval_chart("t", 0.0, 1.0, margin=0.1)
        h = ImmersionMap(chart, 2, lambda p: np.array([5.0, 6.0]))
        phi = ScalarField(chart, lambda p: 1.0)
        f = rotational_immersion(h, phi, 1)
        for p in chart_samples(f.chart, 10, seed=12):
            out = f(p)
            np.testing.assert_array_equal(out[:2], [5.0, 6.0])
            assert np.linalg.norm(out[2:]) == pytest.approx(1.0, abs=1e-15)

    def test_fiber_norm_split_is_exact(self):
        chart = interval_chart("t", 1.0, 2.0, margin=0.1)
        h = ImmersionMap(chart, 2, lambda p: np.array([p[0], 0.0]))
        phi = ScalarField(chart, lambda p: 0.5 * p[0] ** 2)
        f = rotational_immersion(h, phi, 2)
        for p in chart_samples(f.chart, 20, seed=13):
            out = f(p)
            assert np.linalg.norm(out[2:]) == pytest.approx(
                0.5 * p[0] ** 2, rel=1e-14)

    def test_isometric_profile_pulls_back_to_warped_metric(self):
        # profile (t/sqrt2, const, t/sqrt2) is unit speed: <dg,dg> = dt^2
        chart = interval_chart("t", 1.0, 2.0, margin=0.1)
        s = 1.0 / math.sqrt(2.0)
        h = ImmersionMap(chart, 2, lambda p: np.array([s * p[0], 3.0]))
        phi = ScalarField(chart, lambda p: s * p[0],
                          grad=lambda p: np.array([s]))
        f = rotational_immersion(h, phi, 2)
        base = MetricField(chart, lambda p: np.eye(1))
        expected = warped_metric(base, sphere_metric(2), phi)
        for p in chart_samples(f.chart, 20, seed=14):
            np.testing.assert_allclose(pullback_metric(f, p, CFG), expected(p),
                                       atol=1e-7)


class TestWarpedRepresentation:
    def rep2d(self):
        v_chart = interval_chart("v1", 0.3, 3.0, margin=0.15)
        return WarpedRepresentation(q=np.array([1.0, 0.0]), r=1.0,
                                    V_chart=v_chart,
                                    sphere_chart=sphere_inclusion(1).chart)

    def test_flat_polar_pullback(self):
        # oracle (direct computation): psi(s, th) = (s cos th, s sin th),
        # so the pullback is diag(1, s^2)
        psi = warped_representation(self.rep2d())
        for p in chart_samples(psi.chart, 20, seed=15):
            np.testing.assert_allclose(psi(p),
                                       [p[0] * math.cos(p[1]), p[0] * math.sin(p[1])],
                                       atol=1e-14)
            np.testing.assert_allclose(pullback_metric(psi, p, CFG),
                                       np.diag([1.0, p[0] ** 2]), atol=1e-7)

    def test_identity_when_base_point_is_q(self):
        psi = warped_representation(self.rep2d())
        for th in [1.1, 2.0, 4.4]:
            got = psi((1.0, th))
            np.testing.assert_allclose(got, [math.cos(th), math.sin(th)], atol=1e-14)

    def test_fixes_q_on_sphere_factor(self):
        psi = warped_representation(self.rep2d())
        np.testing.assert_allclose(psi((1.7, 0.0)), [1.7, 0.0], atol=1e-14)

    def test_sigma_positive_enforced(self):
        v_chart = interval_chart("v1", -1.0, 3.0, margin=0.15)
        rep = WarpedRepresentation(q=np.array([1.0, 0.0]), r=1.0,
                                   V_chart=v_chart,
                                   sphere_chart=sphere_inclusion(1).chart)
        psi = warped_representation(rep)
        with pytest.raises(NonPositiveSigma):
            psi((-0.5, 1.0))

    def test_validation(self):
        v_chart = interval_chart("v1", 0.3, 3.0, margin=0.15)
        sc = sphere_inclusion(1).chart
        with pytest.raises(ValueError, match="length"):
            WarpedRepresentation(q=np.array([1.0, 0.0, 0.0]), r=1.0,
                                 V_chart=v_chart, sphere_chart=sc)
        with pytest.raises(ValueError, match="\\|q\\|"):
            WarpedRepresentation(q=np.array([2.0, 0.0]), r=1.0,
                                 V_chart=v_chart, sphere_chart=sc)
        with pytest.raises(ValueError, match="axis"):
            WarpedRepresentation(q=np.array([0.0, 1.0]), r=1.0,
                                 V_chart=v_chart, sphere_chart=sc)

    def test_higher_dimensional_pullback(self):
        v_chart = Chart(("v1", "v2"), (-0.8, 0.3), (0.8, 3.0), margin=(0.1, 0.15))
        rep = WarpedRepresentation(q=np.array([0.0, 1.0, 0.0, 0.0]), r=1.0,
                                   V_chart=v_chart,
                                   sphere_chart=sphere_inclusion(2).chart)
        psi = warped_representation(rep)
        for p in chart_samples(psi.chart, 10, seed=16):
            sigma = p[1] / 1.0
            expected = np.zeros((4, 4))
            expected[:2, :2] = np.eye(2)
            expected[2:, 2:] = np.diag(sigma**2 * sphere_diag(p[2:], 2, 1.0))
            np.testing.assert_allclose(pullback_metric(psi, p, CFG), expected,
                                       atol=1e-7)


class TestPointCloudExport:
    def test_rows_on_sphere_with_17_digits(self):
        from einwarp.immersions import point_cloud_text
        f = sphere_inclusion(2, 1.5)
        text = point_cloud_text(f, n=10, seed=1)
        lines = text.strip().splitlines()
        assert len(lines) == 10
        for line in lines:
            vec = np.array([float(v) for v in line.split(",")])
            assert vec.size == 3
            assert np.linalg.norm(vec) == pytest.approx(1.5, abs=1e-12)


class TestFullRankInvariant:
    def test_every_builder_has_full_rank_jacobian(self):
        builders = [
            sphere_inclusion(2, 1.0),
            cone_map(sphere_inclusion(1, 1.0), (0.5, 2.0)),
            cylinder_immersion(sphere_inclusion(1, 1.0), 1),
            product_immersion(sphere_inclusion(1, 1.0), sphere_inclusion(1, 1.0)),
            warped_representation(WarpedRepresentation(
                q=np.array([1.0, 0.0]), r=1.0,
                V_chart=interval_chart("v1", 0.3, 3.0, margin=0.15),
                sphere_chart=sphere_inclusion(1).chart)),
        ]
        for f in builders:
            for p in chart_samples(f.chart, 25, seed=17):
                J = jacobian(f, p, CFG)
                sv = np.linalg.svd(J, compute_uv=False)
                assert sv[-1] > 1e-8
