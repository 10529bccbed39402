"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(RuntimeError):
    """An iterative computation ran out of budget.

    The best available estimate is kept on ``estimate`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class StabilityError(RuntimeError):
    """Time integration drifted out of the physical state space."""


class ModelMismatchError(ValueError):
    """A density matrix is too far from the displaced thermal family."""


class AccuracyWarning(UserWarning):
    """A numerical step size is large enough to spoil the result."""
