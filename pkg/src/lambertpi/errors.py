"""Exception types shared across the package."""


class LambertPIError(Exception):
    """Base class for domain failures reported by this package."""


class DomainError(LambertPIError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class InvalidBranchError(DomainError):
    """A Lambert W branch other than 0 or -1 was requested."""


class UnstableResponseError(LambertPIError, ArithmeticError):
    """A simulated output grew past the divergence guard."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NotSettledError(LambertPIError):
    """A response had not reached steady state by the end of the horizon."""


class UnreachableTargetError(LambertPIError):
    """An overshoot target cannot be bracketed on the tuning interval."""
