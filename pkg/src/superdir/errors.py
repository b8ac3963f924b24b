"""Exception hierarchy and warnings for the superdir package."""


class SuperdirError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SuperdirError, ValueError):
    """An argument violates a documented precondition."""


class ConfigError(SuperdirError):
    """A scenario configuration file or dictionary is malformed."""


class SingularMatrixError(SuperdirError):
    """A matrix required to be (numerically) positive definite is not.

    Carries a condition-number estimate so callers can report how close to
    singular the offending matrix was.
    """

    def __init__(self, message, condition_estimate=None):
        if condition_estimate is not None:
            message = f"{message} (condition estimate {condition_estimate:.3e})"
        super().__init__(message)
        self.condition_estimate = condition_estimate


class InfeasibleChannelError(SuperdirError):
    """The target user's channel lies (numerically) inside the interference span.

    Raised instead of returning a zero weight vector, which would silently
    corrupt downstream statistics.
    """


class IllConditionedWarning(UserWarning):
    """A positive-definite solve proceeded despite a very large condition number."""
