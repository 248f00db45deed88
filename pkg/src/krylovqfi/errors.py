"""Exception types shared by all modules."""


class KrylovQfiError(Exception):
    """Base class for package errors."""


class CapacityError(KrylovQfiError):
    """A requested dense object would exceed the configured memory cap."""


class SymmetryMismatchError(KrylovQfiError):
    """The operator does not commute with the requested symmetry."""


class BasisMismatchError(KrylovQfiError, ValueError):
    """Two objects live in different bases."""


class NumericalError(KrylovQfiError):
    """A numerical procedure failed to produce a trustworthy answer."""
