"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(ValueError):
    """Input is rank deficient (within the configured tolerance)."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its target accuracy.

    ``estimate`` carries the best value obtained before giving up, when one
    exists.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
