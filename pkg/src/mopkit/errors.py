"""Exception types shared across the package."""


class MopkitError(Exception):
    """Base class for all package-specific errors."""


class BackendMismatch(MopkitError):
    """Two values from different arithmetic backends met in one expression."""


class SingularMatrix(MopkitError):
    """Linear system has no unique solution (exactly zero pivot, or pivot
    below tolerance in the float backend)."""


class InvalidMoment(MopkitError):
    """Moment requested outside the family's admissible exponent range."""


class PrecisionExhausted(MopkitError):
    """High-precision quadrature failed to self-converge to the target."""


class UnsupportedPotential(MopkitError):
    """Weight is not of the x^alpha * exp(-polynomial) class."""


class NotNormal(MopkitError):
    """Multi-index is not normal: the mixed-moment system is singular."""


class InconsistentCoefficients(MopkitError):
    """Independent routes to a recurrence coefficient disagree.

    This signals an implementation bug, never a property of the data.
    """


class IdentityViolation(MopkitError):
    """A verified identity has a nonzero residual.

    Carries the full check report on ``self.report`` when raised by a
    verification routine.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateRatio(MopkitError):
    """A ratio-form difference relation has a vanishing denominator."""


class DegenerateElimination(MopkitError):
    """The elimination system for the differential equation is singular."""


class LatticeError(MopkitError):
    """Multi-index neighbor operation would leave the lattice."""


class ConfigError(MopkitError):
    """Invalid run configuration."""
