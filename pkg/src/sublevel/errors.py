"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class NotNormalizableError(InvalidInputError):
    """Raised by ``normalize`` for a single-frequency (zero bandwidth) polynomial."""


class AccuracyError(ArithmeticError):
    """A numerical routine exhausted its budget before meeting its tolerance.

    ``best`` holds the best estimate obtained so far (iterate, integral, ...).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConvergenceError(AccuracyError):
    """Iterative root refinement did not converge within the iteration cap."""
