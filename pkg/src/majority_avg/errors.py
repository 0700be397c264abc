"""Exception types raised by the library."""


class DomainError(ValueError):
    """Argument lies outside the domain where a quantity is defined."""


class ResourceLimitError(RuntimeError):
    """Requested computation exceeds a documented size cap."""
