"""Exception hierarchy shared by every solver module."""


class EewfError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(EewfError, ValueError):
    pass


class InvalidDimensionError(InvalidInputError):
    pass


class UnsupportedDimensionError(InvalidInputError):
    pass


class DomainError(InvalidInputError):
    pass


class InvalidActiveSetError(InvalidInputError):
    pass


class NumericError(EewfError, ArithmeticError):
    pass


class DegenerateChannelError(EewfError, ArithmeticError):
    """The spectrum carries no positive eigenvalue."""


class UndefinedEfficiencyError(EewfError, ZeroDivisionError):
    pass


class InfeasibleMultiplierError(EewfError, ArithmeticError):
    """A water-level denominator is nonpositive for an active channel."""


class RootBracketingError(EewfError, ArithmeticError):
    pass


class NonpositiveMultiplierError(EewfError, ArithmeticError):
    """The converged receive-power multiplier is not strictly positive."""

    def __init__(self, message, mu=None, x=None):
        super().__init__(message)
        self.mu = mu
        self.x = x


class ConvergenceError(EewfError, RuntimeError):
    """The outer fixed-point loop hit its iteration cap.

    ``last_iterate`` holds the final (unconverged) allocation state.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class EnsembleError(EewfError, RuntimeError):
    pass


class NonpositiveMultiplierWarning(RuntimeWarning):
    pass
