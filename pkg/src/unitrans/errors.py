"""Exception hierarchy shared by every solver module."""


class UnitransError(Exception):
    """Base class for all solver errors."""


class ConfigError(UnitransError):
    """A run configuration violates the schema or a solver precondition."""


class DivergentMoment(UnitransError):
    """The weighted moment of a potential does not converge."""


class IntegrationFailure(UnitransError):
    """The adaptive ODE integrator could not meet its tolerance."""


class QuadratureFailure(UnitransError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available value and its error estimate are attached.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class NearZeroWavenumber(UnitransError):
    """A scattering quantity was requested too close to k = 0."""


class OverflowRisk(UnitransError):
    """The time-transform kernel exp(i k^2 tau) grows beyond safe limits."""


class PoleOnContour(UnitransError):
    """A pole of the integrand lies on (or too near) the integration contour."""


class PsiZeroAtOrigin(UnitransError):
    """psi(0, k) vanishes at an evaluation point of a Dirichlet formula."""


class PsiXZeroAtOrigin(UnitransError):
    """psi_x(0, k) vanishes at an evaluation point of a Neumann formula."""


class BoundStatePresent(UnitransError):
    """The potential supports bound states where the method assumes none."""


class LinearSolveFailure(UnitransError):
    """A finite-difference linear system could not be solved."""
