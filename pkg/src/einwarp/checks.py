"""Pass/fail verification checks with quantified residuals.

Each check samples deterministically (seeded quasi-uniform points), reduces
to a max/mean residual against an explicit tolerance, and returns a
CheckResult; a report is a fixed-order list of results.  Two runs with the
same seed and FD configuration produce bit-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import curvature
from .errors import RankDeficient
from .geometry import FDConfig, MetricField, ScalarField
from .immersions import ImmersionMap, jacobian, pullback_metric
from .sampling import chart_samples
from .warp import EinsteinData

DEFAULT_SAMPLES = 64
ISOMETRY_TOL = 1e-6        # first-derivative checks
CURVATURE_TOL = 1e-3       # second derivatives through nested FD


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    samples_used: int
    estimated_constant: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "estimated_constant": self.estimated_constant,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "samples_used": self.samples_used,
        }


def make_result(check_id: str, residuals, tol: float,
                estimate: Optional[float] = None) -> CheckResult:
    res = np.atleast_1d(np.asarray(residuals, dtype=float))
    mx = float(np.max(res))
    return CheckResult(
        check_id=check_id,
        max_residual=mx,
        mean_residual=float(np.mean(res)),
        tolerance=float(tol),
        passed=bool(mx <= tol),
        samples_used=int(res.size),
        estimated_constant=None if estimate is None else float(estimate),
    )


@dataclass
class VerificationReport:
    scenario_id: str
    parameters: dict
    checks: list[CheckResult]
    overall_passed: bool
    timestamp: str
    engine_config: dict

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "parameters": self.parameters,
            "checks": [c.to_dict() for c in self.checks],
            "overall_passed": self.overall_passed,
            "timestamp": self.timestamp,
            "engine_config": self.engine_config,
        }


def _resolve_samples(chart, samples, seed: int) -> np.ndarray:
    if isinstance(samples, (int, np.integer)):
        return chart_samples(chart, int(samples), seed)
    return np.atleast_2d(np.asarray(samples, dtype=float))


def einstein_check(g: MetricField, samples=DEFAULT_SAMPLES, tol: float = CURVATURE_TOL,
                   cfg: FDConfig = FDConfig(), seed: int = 0,
                   check_id: str = "einstein") -> CheckResult:
    """Least-squares fit of Ric = rho g over all sampled component pairs.

    The estimate pools every (i <= j) pair instead of taking pointwise ratios,
    which would divide by near-zero metric components in spherical charts.
    Residuals are normalized by 1 + |rho_hat| * max|g|.
    """
    pts = _resolve_samples(g.chart, samples, seed)
    d = g.chart.dim
    iu = np.triu_indices(d)
    rics, mets = [], []
    for p in pts:
        rics.append(curvature.ricci(g, p, cfg)[iu])
        mets.append(g(p)[iu])
    ric_v = np.concatenate(rics)
    met_v = np.concatenate(mets)
    rho_hat = float(ric_v @ met_v / (met_v @ met_v))
    gmax = float(np.max(np.abs(met_v)))
    scale = 1.0 + abs(rho_hat) * gmax
    per_sample = [np.max(np.abs(r - rho_hat * m)) / scale for r, m in zip(rics, mets)]
    return make_result(check_id, per_sample, tol, estimate=rho_hat)


def isometry_check(f: ImmersionMap, g_expected: MetricField, samples=DEFAULT_SAMPLES,
                   tol: float = ISOMETRY_TOL, cfg: FDConfig = FDConfig(), seed: int = 0,
                   check_id: str = "isometry") -> CheckResult:
    """Componentwise |pullback(f) - g_expected|, relative to max|g_expected|."""
    pts = _resolve_samples(f.chart, samples, seed)
    pulls = [pullback_metric(f, p, cfg) for p in pts]
    exps = [g_expected(p) for p in pts]
    gnorm = max(float(np.max(np.abs(e))) for e in exps)
    per_sample = [np.max(np.abs(a - b)) / gnorm for a, b in zip(pulls, exps)]
    return make_result(check_id, per_sample, tol)


def trace_identity_check(data: EinsteinData, base_metric: MetricField, phi: ScalarField,
                         samples=DEFAULT_SAMPLES, tol: float = CURVATURE_TOL,
                         cfg: FDConfig = FDConfig(), seed: int = 0,
                         check_id: str = "trace-identity") -> CheckResult:
    """Residual of (n-m) Delta phi = phi (S_L - m rho), with S_L computed."""
    pts = _resolve_samples(base_metric.chart, samples, seed)
    res = []
    for p in pts:
        lap = curvature.laplacian(phi, base_metric, p, cfg)
        s_l = curvature.scalar_curvature(base_metric, p, cfg)
        res.append(abs((data.n - data.m) * lap - phi(p) * (s_l - data.m * data.rho)))
    return make_result(check_id, res, tol)


def combined_identity_check(data: EinsteinData, base_metric: MetricField, phi: ScalarField,
                            samples=DEFAULT_SAMPLES, tol: float = CURVATURE_TOL,
                            cfg: FDConfig = FDConfig(), seed: int = 0,
                            check_id: str = "combined-identity") -> CheckResult:
    """Residual of S_L + (n-2m) rho = (n-m)(n-m-1)(eps - |grad phi|^2)/phi^2."""
    n, m = data.n, data.m
    pts = _resolve_samples(base_metric.chart, samples, seed)
    res = []
    for p in pts:
        s_l = curvature.scalar_curvature(base_metric, p, cfg)
        gn2 = curvature.gradient_norm_sq(phi, base_metric, p, cfg)
        w = phi(p)
        rhs = (n - m) * (n - m - 1) * (data.eps - gn2) / (w * w)
        res.append(abs(s_l + (n - 2 * m) * data.rho - rhs))
    return make_result(check_id, res, tol)


def gradient_bound_check(f_profile: ImmersionMap, samples=DEFAULT_SAMPLES,
                         slack: float = 1e-8, cfg: FDConfig = FDConfig(), seed: int = 0,
                         check_id: str = "gradient-bound") -> CheckResult:
    """|grad phi| <= 1 for the last ambient coordinate of an isometric profile.

    grad phi is computed intrinsically: phi's differential is the last row of
    the Jacobian and the metric is the pullback.  Reports max |grad phi| as the
    estimated constant; the residual is its excess over 1.
    """
    pts = _resolve_samples(f_profile.chart, samples, seed)
    norms = []
    for p in pts:
        J = jacobian(f_profile, p, cfg)
        sv = np.linalg.svd(J, compute_uv=False)
        if sv[-1] < 1e-8:
            raise RankDeficient(f"profile Jacobian rank-deficient at {p}")
        G = J.T @ J
        dphi = J[-1, :]
        norms.append(float(np.sqrt(dphi @ np.linalg.solve(G, dphi))))
    mx = max(norms)
    return make_result(check_id, [max(0.0, v - 1.0) for v in norms], slack, estimate=mx)


def constancy_check(fld: ScalarField, samples=DEFAULT_SAMPLES, tol: float = 1e-8,
                    seed: int = 0, check_id: str = "constancy") -> CheckResult:
    """Max deviation of sampled field values from their median."""
    pts = _resolve_samples(fld.chart, samples, seed)
    vals = np.array([fld(p) for p in pts])
    med = float(np.median(vals))
    return make_result(check_id, np.abs(vals - med), tol, estimate=med)


def threshold_check(check_id: str, value: float, minimum: float) -> CheckResult:
    """Pass when value >= minimum; residual is the shortfall.

    Used for spread/detection criteria where a quantity must be large, which
    keeps the `passed iff max_residual <= tolerance` convention.
    """
    return CheckResult(
        check_id=check_id,
        max_residual=max(0.0, minimum - value),
        mean_residual=max(0.0, minimum - value),
        tolerance=0.0,
        passed=bool(value >= minimum),
        samples_used=1,
        estimated_constant=float(value),
    )
