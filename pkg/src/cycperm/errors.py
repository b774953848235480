"""Exception types shared across the package."""


class CycpermError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidPattern(CycpermError):
    """A pattern word, permutation, or weight table is malformed."""


class EmptyPoint(CycpermError):
    """Standardization of a zero-length point was requested."""


class TooShort(CycpermError):
    """The permutation is too short for the requested window operation."""


class TooLarge(CycpermError):
    """The requested size exceeds the exact-enumeration budget."""


class ResolutionTooHigh(CycpermError):
    """The requested grid would exceed the discretization memory budget."""


class RequiresNonnegative(CycpermError):
    """The operation is defined only for nonnegative weights."""


class EigenFailure(CycpermError):
    """An eigenvalue computation failed to converge."""


class OutOfDomain(CycpermError):
    """Series argument outside the convergent range."""
