"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation-type errors exit 2,
solver failures exit 3 and invariant alarms exit 4.
"""


class VortexLabError(Exception):
    """Base class for all package errors."""


class ValidationError(VortexLabError, ValueError):
    """Input outside the admissible range of a routine."""


class DomainError(ValidationError):
    """A radius outside the manifold interval."""


class ConfigurationError(ValidationError):
    """Inconsistent or incomplete manifold/representation data."""


class ConstraintViolation(ValidationError):
    """Exponent or spectral parameter violating a solver hypothesis."""


class SolverError(VortexLabError, RuntimeError):
    """A numerical routine failed to produce an answer."""


class StiffnessError(SolverError):
    """Adaptive integrator step size underflowed."""

    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class NoGroundState(SolverError):
    """Shooting scan found no bracket for the positive separatrix."""


class ConvergenceError(SolverError):
    """Iteration limit reached without meeting the tolerance."""


class InvariantViolation(VortexLabError, AssertionError):
    """A computed quantity contradicts a structural property (alarm)."""
