"""Exception types shared across the package."""


class DeformedQmError(Exception):
    """Base class for errors raised by this package."""


class WrongRegimeError(DeformedQmError, ValueError):
    """Operation requested for the wrong sign of the deformation parameter."""


class GridMismatchError(DeformedQmError, ValueError):
    """Operands live on different grids."""


class OutOfDomainError(DeformedQmError, ValueError):
    """Evaluation point outside the operator's momentum-space domain."""


class NormalizationError(DeformedQmError, ValueError):
    """State is not normalized to within the required tolerance."""


class IntegrationFailureError(DeformedQmError, RuntimeError):
    """Adaptive ODE integration failed before reaching the requested points."""

    def __init__(self, message, last_lambda=None):
        super().__init__(message)
        self.last_lambda = last_lambda


class InconclusiveFitError(DeformedQmError, RuntimeError):
    """Boundary-exponent fit too noisy to classify convergence."""
