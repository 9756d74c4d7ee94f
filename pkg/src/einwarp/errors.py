"""Exception hierarchy for the einwarp toolkit."""


class EinwarpError(Exception):
    """Base class for all einwarp errors."""


class BoundaryViolation(EinwarpError):
    """A finite-difference stencil would leave the chart domain."""


class NonFiniteValue(EinwarpError):
    """A field evaluation returned NaN or infinity."""


class SingularMetric(EinwarpError):
    """Metric matrix is numerically non-invertible (cond > 1e12)."""


class DegeneratePlane(EinwarpError):
    """Tangent plane spanned by (u, v) has near-zero Gram determinant."""


class NonPositiveWarp(EinwarpError):
    """Warping function is not strictly positive where required."""


class ParameterConstraintViolated(EinwarpError):
    """Closed-form warp parameters violate their defining relation."""

    def __init__(self, relation: str, detail: str = ""):
        self.relation = relation
        msg = f"parameter constraint violated: {relation}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidGSParameters(EinwarpError):
    """Generalized-Schwarzschild ODE parameters out of range (need n >= 5, c < 0)."""


class IntegrationAccuracyError(EinwarpError):
    """ODE table failed its conserved-quantity accuracy target."""


class NonPositiveDenominator(EinwarpError):
    """Scalar-curvature combination S_L + (n-2m)*rho must be positive."""


class NonPositiveSigma(EinwarpError):
    """Warped-representation weight sigma is not positive on the sampled domain."""


class RankDeficient(EinwarpError):
    """Immersion Jacobian has a singular value below the rank threshold."""


class UnknownScenario(EinwarpError):
    """Scenario id not present in the registry."""


class InvalidParameter(EinwarpError):
    """Scenario parameter unknown or outside its accepted range."""

    def __init__(self, name: str, detail: str):
        self.name = name
        self.detail = detail
        super().__init__(f"invalid parameter {name!r}: {detail}")
