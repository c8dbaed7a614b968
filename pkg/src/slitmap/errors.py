"""Exception types raised across the package."""


class SlitMapError(ValueError):
    """Base class for all errors raised by slitmap."""


class GeometryError(SlitMapError):
    """Invalid region, curve or discretization."""


class DomainError(SlitMapError):
    """A query or auxiliary point lies where it is not allowed."""


class NumericalError(SlitMapError):
    """The numerical pipeline failed (singular system, non-finite values)."""
