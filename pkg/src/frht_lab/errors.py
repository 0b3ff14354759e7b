"""Exception hierarchy shared by all modules."""


class FrhtLabError(Exception):
    """Base class for library errors."""


class DomainError(FrhtLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ArgumentError(FrhtLabError, ValueError):
    """A malformed argument (wrong count, length, ordering)."""


class CapabilityError(FrhtLabError):
    """A test function cannot supply the requested derivative order."""


class CoverageError(FrhtLabError):
    """A sampled grid does not cover the region an operation needs."""


class ConvergenceError(FrhtLabError):
    """Quadrature or extrapolation failed to reach the requested tolerance.

    ``partial`` carries the best result obtained before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
