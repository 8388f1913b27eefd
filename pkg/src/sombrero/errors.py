"""Exception hierarchy shared by the solver modules."""


class SombreroError(Exception):
    """Base class for all package errors."""


class StructuralError(SombreroError, ValueError):
    """Model parameters violate N >= 2, l >= 0, g > 0 or a > 0."""


class DomainError(SombreroError, ValueError):
    """A function was evaluated outside its domain."""


class InvalidWindow(SombreroError):
    """Parameters lie outside the sufficient window for monotone iteration."""


class ConfigError(SombreroError, ValueError):
    """Grid or solver configuration is unusable."""


class NonpositiveIterate(SombreroError):
    """The previous iterate f_{m-1} is not strictly positive on the grid."""


class BoundaryBreakdown(SombreroError):
    """Under f(0) = 1 an iterate reached f_m(r_max) <= 0.

    ``partial`` holds the sequences computed before the breakdown.
    """

    def __init__(self, message, m=None, f_at_far=None, partial=None):
        super().__init__(message)
        self.m = m
        self.f_at_far = f_at_far
        self.partial = partial


class NotConverged(SombreroError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoBracket(SombreroError):
    """Energy bisection bounds do not straddle the ground state."""
