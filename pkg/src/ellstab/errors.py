"""Exception hierarchy shared by every module of the package."""


class EllStabError(Exception):
    """Base class for all package errors."""


class ValidationError(EllStabError, ValueError):
    """Malformed input data (dimension vectors, chambers, arrows, text)."""


class DomainError(EllStabError, ValueError):
    """An operation was applied outside its domain (e.g. theta(0))."""


class PoleError(EllStabError):
    """A theta/pochhammer factor of the denominator vanished identically."""

    def __init__(self, message, argument=None, term=None):
        super().__init__(message)
        self.argument = argument
        self.term = term


class GenericityError(EllStabError):
    """A weight paired to zero with the chosen chamber."""

    def __init__(self, message, weight=None):
        super().__init__(message)
        self.weight = weight


class DivergenceError(EllStabError):
    """The q -> 0 limit has a negative leading power of q."""


class NotQuasiPeriodicError(EllStabError):
    """A shift v -> q v did not multiply the expression by a monomial."""
