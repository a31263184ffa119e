"""Exception types shared across the package."""


class FraxError(Exception):
    """Base class for all package errors."""


class DomainError(FraxError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a kernel singularity."""


class UnsupportedOrderError(DomainError):
    """Requested order or dimension is not covered by the chosen code path."""


class AccuracyError(FraxError, RuntimeError):
    """Quadrature did not reach its tolerance.

    ``value`` and ``err_est`` hold the best estimate available when
    refinement stopped.
    """

    def __init__(self, message, value=float("nan"), err_est=float("inf")):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class SolverError(FraxError, RuntimeError):
    """Linear solve failed or missed its residual target."""


class CollisionError(FraxError, RuntimeError):
    """Two vortices came closer than the configured collision radius."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class StepSizeError(FraxError, RuntimeError):
    """Implicit stage equation did not converge; reduce dt."""
