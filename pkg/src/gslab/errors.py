"""Shared exception types."""


class GslabError(Exception):
    """Base class for library errors."""


class DomainError(GslabError, ValueError):
    """Invalid argument: wrong q, malformed ranking, index out of range, etc."""


class ProfileCapExceeded(GslabError):
    """An exhaustive computation would enumerate more profiles than the cap allows."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"exhaustive enumeration of {count} profiles exceeds cap {cap}; "
            f"raise the cap explicitly if this is intended"
        )
        self.count = count
        self.cap = cap


class TheoremViolation(GslabError):
    """A guaranteed witness could not be produced.

    This signals an implementation bug (the underlying mathematical guarantee
    cannot fail), so it is never swallowed.
    """
