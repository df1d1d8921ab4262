"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateSpecError(DomainError):
    """A state recipe produced the zero vector (nothing to normalize)."""


class NumericalValidityError(ArithmeticError):
    """A matrix that must be positive semidefinite has a clearly negative eigenvalue."""


class EnumerationRefused(DomainError):
    """Exhaustive enumeration was requested for a mode set that is too large."""
