"""Warped-product metrics and the Einstein system for the warping function.

Covers: the two tensor equations an Einstein warped product imposes on the
warping function, their one-variable reductions when the base is also
Einstein, the forced relation (n-1)*mu = (m-1)*rho, the closed-form warping
functions per sign of rho, the geodesic profile u(s) = a sin(shift + s/a),
and the generalized-Schwarzschild ODE phi'^2 = 1 + c/phi^(n-3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import curvature
from .errors import (
    IntegrationAccuracyError,
    InvalidGSParameters,
    NonPositiveDenominator,
    NonPositiveWarp,
    ParameterConstraintViolated,
)
from .geometry import Chart, FDConfig, MetricField, ScalarField, interval_chart, product_chart

_REL_TOL = 1e-12


def mu_from_rho(n: int, m: int, rho: float) -> float:
    """Base Einstein constant forced by the reduced system: (n-1) mu = (m-1) rho."""
    return (m - 1) * rho / (n - 1)


def fiber_ricci_constant(n: int, m: int, eps: int, rho: float) -> float:
    """Einstein constant of the (m-1)-dimensional leaf factor: (m-2) eps rho / (n-1)."""
    return (m - 2) * eps * rho / (n - 1)


@dataclass(frozen=True)
class EinsteinData:
    """Dimensions and constants of a warped-product Einstein configuration.

    eps is the normalized fiber Einstein sign; fiber metrics are supplied
    already normalized (any homothety is the caller's responsibility).
    """

    n: int
    m: int
    rho: float
    eps: int
    mu: Optional[float] = None
    s_l: Optional[float] = None

    def __post_init__(self):
        if self.m < 1 or self.n <= self.m:
            raise ValueError(f"need n > m >= 1, got n={self.n}, m={self.m}")
        if self.eps not in (-1, 0, 1):
            raise ValueError(f"eps must be -1, 0 or +1, got {self.eps}")

    @property
    def mu_effective(self) -> float:
        return self.mu if self.mu is not None else mu_from_rho(self.n, self.m, self.rho)

    @classmethod
    def double_einstein(cls, n: int, m: int, rho: float, eps: int,
                        s_l: Optional[float] = None) -> "EinsteinData":
        """Base-also-Einstein configuration with mu forced by the relation."""
        if n < m + 2:
            raise ValueError(f"double-Einstein setting needs n >= m+2, got n={n}, m={m}")
        mu = mu_from_rho(n, m, rho)
        if s_l is None:
            s_l = m * mu
        return cls(n=n, m=m, rho=rho, eps=eps, mu=mu, s_l=s_l)


@dataclass(frozen=True)
class WarpSolution:
    """A warping function with exact (or tabulated) first two derivatives.

    phi/phi1/phi2 accept floats or arrays and raise outside `domain`;
    evaluation never extrapolates.
    """

    case_tag: str
    params: dict
    data: EinsteinData
    phi: Callable
    phi1: Callable
    phi2: Callable
    domain: tuple[float, float]

    def grid(self, num: int = 200, shrink: float = 1e-6) -> np.ndarray:
        """Evenly spaced points strictly inside the domain."""
        lo, hi = self.domain
        pad = shrink * (hi - lo)
        return np.linspace(lo + pad, hi - pad, num)

    def table(self, num: int = 200) -> np.ndarray:
        ts = self.grid(num)
        return np.column_stack([ts, self.phi(ts)])

    def table_text(self, num: int = 200, delimiter: str = "\t") -> str:
        lines = [f"{t:.17g}{delimiter}{v:.17g}" for t, v in self.table(num)]
        return "\n".join(lines) + "\n"

    def write_table(self, path, num: int = 200, delimiter: str = "\t") -> None:
        with open(path, "w") as fh:
            fh.write(self.table_text(num, delimiter))

    def as_scalar_field(self, chart: Chart, coord: int = 0) -> ScalarField:
        """phi as a field on `chart`, read off coordinate `coord`."""

        def fn(p):
            return float(self.phi(p[coord]))

        def grad(p):
            out = np.zeros(chart.dim)
            out[coord] = float(self.phi1(p[coord]))
            return out

        return ScalarField(chart, fn, grad=grad)


def _domain_guard(fn: Callable, lo: float, hi: float, slack: float) -> Callable:
    def guarded(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise ValueError(
                f"warping function evaluated at t outside its domain "
                f"[{lo:g}, {hi:g}] (no extrapolation)"
            )
        return fn(t)

    return guarded


def _constraint(ok: bool, relation: str, detail: str):
    if not ok:
        raise ParameterConstraintViolated(relation, detail)


def closed_form_warp(data: EinsteinData, a: Optional[float] = None,
                     b: Optional[float] = None, t0: float = 0.0,
                     span: float = 10.0) -> WarpSolution:
    """Closed-form warping function for the reduced system, by sign of rho.

    rho = 0:  phi(t) = t - t0 on t > t0 (eps must be +1; a, b unused).
    rho > 0:  phi = a cos(lam (t-t0)) + b sin(lam (t-t0)), lam = sqrt(rho/(n-1)),
              a, b >= 0 with a^2 + b^2 = (n-1)/rho, on (t0, t0 + pi/(2 lam)).
    rho < 0:  phi = a cosh(lam (t-t0)) + b sinh(lam (t-t0)), lam = sqrt(-rho/(n-1)),
              a^2 - b^2 = eps (n-1)/rho, restricted to a window where phi > 0.
              The window is capped at |lam (t-t0)| <= 4: beyond that, evaluating
              phi'^2 - phi^2 cancels catastrophically and the residual identities
              can no longer be certified at the 1e-10 level.
    """
    n, rho, eps = data.n, data.rho, data.eps
    scale = max(1.0, abs((n - 1) / rho)) if rho != 0.0 else 1.0

    if rho == 0.0:
        _constraint(eps == 1, "eps = 1 when rho = 0", f"got eps={eps}")
        lo, hi = t0, t0 + span
        slack = _REL_TOL * span
        return WarpSolution(
            case_tag="zero",
            params={"a": None, "b": None, "t0": t0, "c": None},
            data=data,
            phi=_domain_guard(lambda t: t - t0, lo, hi, slack),
            phi1=_domain_guard(lambda t: np.ones_like(t), lo, hi, slack),
            phi2=_domain_guard(lambda t: np.zeros_like(t), lo, hi, slack),
            domain=(lo, hi),
        )

    if a is None or b is None:
        raise ParameterConstraintViolated("a, b required", "rho != 0 needs explicit a, b")
    a, b = float(a), float(b)

    if rho > 0.0:
        _constraint(eps == 1, "eps = 1 when rho > 0", f"got eps={eps}")
        _constraint(a >= 0.0 and b >= 0.0, "a, b >= 0", f"got a={a}, b={b}")
        _constraint(
            abs(a * a + b * b - (n - 1) / rho) <= _REL_TOL * scale,
            "a^2 + b^2 = (n-1)/rho",
            f"a^2+b^2={a * a + b * b:.17g}, (n-1)/rho={(n - 1) / rho:.17g}",
        )
        lam = math.sqrt(rho / (n - 1))
        lo, hi = t0, t0 + 0.5 * math.pi / lam
        slack = _REL_TOL * (hi - lo)
        phi = lambda t: a * np.cos(lam * (t - t0)) + b * np.sin(lam * (t - t0))
        phi1 = lambda t: lam * (-a * np.sin(lam * (t - t0)) + b * np.cos(lam * (t - t0)))
        phi2 = lambda t: -lam * lam * phi(t)
        return WarpSolution(
            case_tag="positive",
            params={"a": a, "b": b, "t0": t0, "c": None},
            data=data,
            phi=_domain_guard(phi, lo, hi, slack),
            phi1=_domain_guard(phi1, lo, hi, slack),
            phi2=_domain_guard(phi2, lo, hi, slack),
            domain=(lo, hi),
        )

    _constraint(
        abs(a * a - b * b - eps * (n - 1) / rho) <= _REL_TOL * scale,
        "a^2 - b^2 = eps (n-1)/rho",
        f"a^2-b^2={a * a - b * b:.17g}, eps(n-1)/rho={eps * (n - 1) / rho:.17g}",
    )
    lam = math.sqrt(-rho / (n - 1))
    phi = lambda t: a * np.cosh(lam * (t - t0)) + b * np.sinh(lam * (t - t0))
    phi1 = lambda t: lam * (a * np.sinh(lam * (t - t0)) + b * np.cosh(lam * (t - t0)))
    phi2 = lambda t: lam * lam * phi(t)
    # positivity window: a cosh(u) + b sinh(u) > 0, capped for conditioning
    w = min(0.5 * span, 4.0) / lam
    if a > 0.0 and a >= abs(b):
        lo, hi = t0 - w, t0 + w
    elif b > abs(a):
        ustar = math.atanh(-a / b)
        lo = t0 + ustar / lam
        hi = lo + w
    elif -b > abs(a):
        ustar = math.atanh(-a / b)
        hi = t0 + ustar / lam
        lo = hi - w
    else:
        raise ParameterConstraintViolated(
            "phi > 0 on an open interval", f"a={a}, b={b} admits no positive branch"
        )
    slack = _REL_TOL * (hi - lo)
    return WarpSolution(
        case_tag="negative",
        params={"a": a, "b": b, "t0": t0, "c": None},
        data=data,
        phi=_domain_guard(phi, lo, hi, slack),
        phi1=_domain_guard(phi1, lo, hi, slack),
        phi2=_domain_guard(phi2, lo, hi, slack),
        domain=(lo, hi),
    )


# ---------------------------------------------------------------------------
# generalized-Schwarzschild warping function
# ---------------------------------------------------------------------------


def _hermite_eval(ts: np.ndarray, ys: np.ndarray, dys: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Cubic Hermite interpolation on a uniform table with known derivatives."""
    idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
    h = ts[idx + 1] - ts[idx]
    s = (t - ts[idx]) / h
    s2 = s * s
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s2 * (3.0 - 2.0 * s)
    h11 = s2 * (s - 1.0)
    return h00 * ys[idx] + h * h10 * dys[idx] + h01 * ys[idx + 1] + h * h11 * dys[idx + 1]


def gs_warp(n: int, c: float, t_max: float = 5.0, step: float = 1e-3) -> WarpSolution:
    """Tabulated warping function with first integral phi'^2 = 1 + c/phi^(n-3).

    The first-order equation is singular at its turning point (phi' = 0 with
    infinite sensitivity), so the table integrates the differentiated form
    phi'' = -(n-3) c / (2 phi^(n-2)) from phi(0) = (-c)^(1/(n-3)), phi'(0) = 0
    with classical fixed-step RK4; the first-order equation is kept as a
    conserved quantity and checked on nodes and midpoints.
    """
    if n < 5 or c >= 0.0:
        raise InvalidGSParameters(f"need n >= 5 and c < 0, got n={n}, c={c}")
    if not (0.0 < step <= t_max / 10.0):
        raise InvalidGSParameters(f"need 0 < step <= t_max/10, got step={step}")

    nsteps = int(math.ceil(t_max / step))
    h = t_max / nsteps
    ts = np.linspace(0.0, t_max, nsteps + 1)
    phi0 = (-c) ** (1.0 / (n - 3))
    acc = -(n - 3) * c * 0.5

    def f2(phi):
        return acc / phi ** (n - 2)

    ph = np.empty(nsteps + 1)
    dph = np.empty(nsteps + 1)
    ph[0], dph[0] = phi0, 0.0
    y0, y1 = phi0, 0.0
    for k in range(nsteps):
        k1a, k1b = y1, f2(y0)
        k2a, k2b = y1 + 0.5 * h * k1b, f2(y0 + 0.5 * h * k1a)
        k3a, k3b = y1 + 0.5 * h * k2b, f2(y0 + 0.5 * h * k2a)
        k4a, k4b = y1 + h * k3b, f2(y0 + h * k3a)
        y0 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y1 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        ph[k + 1], dph[k + 1] = y0, y1

    ddph = f2(ph)
    slack = _REL_TOL * t_max

    phi = _domain_guard(lambda t: _hermite_eval(ts, ph, dph, np.asarray(t, float)), 0.0, t_max, slack)
    phi1 = _domain_guard(lambda t: _hermite_eval(ts, dph, ddph, np.asarray(t, float)), 0.0, t_max, slack)
    phi2 = _domain_guard(lambda t: f2(_hermite_eval(ts, ph, dph, np.asarray(t, float))), 0.0, t_max, slack)

    probe = np.concatenate([ts, 0.5 * (ts[:-1] + ts[1:])])
    resid = np.max(np.abs(phi1(probe) ** 2 - 1.0 - c / phi(probe) ** (n - 3)))
    if resid > 1e-8:
        raise IntegrationAccuracyError(
            f"first-integral residual {resid:.3e} exceeds 1e-8; reduce the step"
        )

    return WarpSolution(
        case_tag="gs",
        params={"a": None, "b": None, "t0": 0.0, "c": float(c)},
        data=EinsteinData(n=n, m=2, rho=0.0, eps=1),
        phi=phi,
        phi1=phi1,
        phi2=phi2,
        domain=(0.0, t_max),
    )


def gs_first_integral_residual(sol: WarpSolution, ts) -> np.ndarray:
    """phi'^2 - 1 - c/phi^(n-3) evaluated on ts (zero for a GS solution)."""
    c = sol.params["c"]
    if c is None:
        raise ValueError("solution has no GS constant c")
    n = sol.data.n
    ts = np.asarray(ts, dtype=float)
    return sol.phi1(ts) ** 2 - 1.0 - c / sol.phi(ts) ** (n - 3)


# ---------------------------------------------------------------------------
# warped metric and residual operations
# ---------------------------------------------------------------------------


def warped_metric(base: MetricField, fiber: MetricField, phi: ScalarField) -> MetricField:
    """Block metric g_base (+) phi^2 g_fiber on the product chart."""
    if phi.chart.dim != base.chart.dim:
        raise ValueError("phi must live on the base chart")
    chart = product_chart(base.chart, fiber.chart)
    db = base.chart.dim
    d = chart.dim

    def fn(p):
        pb, pf = p[:db], p[db:]
        w = float(phi.fn(pb))
        if w <= 0.0:
            raise NonPositiveWarp(f"phi({pb}) = {w:g} <= 0")
        out = np.zeros((d, d))
        out[:db, :db] = base.fn(pb)
        out[db:, db:] = (w * w) * np.asarray(fiber.fn(pf), dtype=float)
        return out

    return MetricField(chart, fn)


def product_metric(a: MetricField, b: MetricField) -> MetricField:
    """Direct-sum metric on the product chart (warped product with phi = 1)."""
    one = ScalarField(a.chart, lambda p: 1.0, grad=lambda p: np.zeros(a.chart.dim))
    return warped_metric(a, b, one)


def residual_eq1(data: EinsteinData, base_metric: MetricField, phi: ScalarField,
                 p, X, Y, cfg: FDConfig = FDConfig()) -> float:
    """(n-m) Hess phi(X,Y) - (Ric_L(X,Y) - rho <X,Y>) phi at p on the base."""
    p = np.asarray(p, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    H = curvature.hessian(phi, base_metric, p, cfg)
    ric = curvature.ricci(base_metric, p, cfg)
    G = base_metric(p)
    w = phi(p)
    return float((data.n - data.m) * (X @ H @ Y) - (X @ (ric - data.rho * G) @ Y) * w)


def residual_eq2(data: EinsteinData, base_metric: MetricField, phi: ScalarField,
                 p, cfg: FDConfig = FDConfig()) -> float:
    """Delta phi + (n-m-1)/phi (|grad phi|^2 - eps) + rho phi at p on the base."""
    p = np.asarray(p, dtype=float)
    w = phi(p)
    if w <= 0.0:
        raise NonPositiveWarp(f"phi({p}) = {w:g} <= 0")
    lap = curvature.laplacian(phi, base_metric, p, cfg)
    gn2 = curvature.gradient_norm_sq(phi, base_metric, p, cfg)
    return float(lap + (data.n - data.m - 1) / w * (gn2 - data.eps) + data.rho * w)


def residual_eq3(data: EinsteinData, sol: WarpSolution, t):
    """(n-m) phi'' - (mu - rho) phi, the base-Einstein Hessian reduction."""
    mu = data.mu_effective
    return (data.n - data.m) * sol.phi2(t) - (mu - data.rho) * sol.phi(t)


def residual_eq4(data: EinsteinData, sol: WarpSolution, t):
    """phi'^2 - eps + (m mu + (n-2m) rho) / ((n-m)(n-m-1)) phi^2."""
    n, m = data.n, data.m
    mu = data.mu_effective
    coeff = (m * mu + (n - 2 * m) * data.rho) / ((n - m) * (n - m - 1))
    return sol.phi1(t) ** 2 - data.eps + coeff * sol.phi(t) ** 2


def residuals_reduced(data: EinsteinData, sol: WarpSolution, t):
    """Residuals of (n-1) phi'' + rho phi = 0 and phi'^2 = eps - rho phi^2/(n-1)."""
    n = data.n
    r1 = (n - 1) * sol.phi2(t) + data.rho * sol.phi(t)
    r2 = sol.phi1(t) ** 2 - data.eps + data.rho * sol.phi(t) ** 2 / (n - 1)
    return r1, r2


def closed_form_u(data: EinsteinData, t0_shift: float = 0.0) -> tuple[ScalarField, float]:
    """Warping profile along a gradient geodesic: u(s) = a sin(shift + s/a).

    a = sqrt((n-m)(n-m-1) / (S_L + (n-2m) rho)); requires that denominator
    to be positive.
    """
    if data.s_l is None:
        raise ValueError("EinsteinData.s_l (scalar curvature of the base) is required")
    denom = data.s_l + (data.n - 2 * data.m) * data.rho
    if denom <= 0.0:
        raise NonPositiveDenominator(
            f"S_L + (n-2m) rho = {denom:g} must be positive"
        )
    a = math.sqrt((data.n - data.m) * (data.n - data.m - 1) / denom)
    chart = interval_chart("s", 0.0, 0.5 * math.pi * a, margin=0.05 * a)

    def fn(p):
        return a * math.sin(t0_shift + p[0] / a)

    def grad(p):
        return np.array([math.cos(t0_shift + p[0] / a)])

    return ScalarField(chart, fn, grad=grad), a
