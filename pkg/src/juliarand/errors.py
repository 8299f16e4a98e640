"""Exception taxonomy shared across the package."""


class JuliaRandError(Exception):
    """Base class for errors raised by this package."""


class DomainError(JuliaRandError, ValueError):
    """The requested computation is not defined for these inputs.

    Raised e.g. when neither fixed point of z^2 + c is repelling, or when a
    preimage tree runs through the critical point (the map is not hyperbolic
    on its Julia set there, so the derivative weights degenerate).
    """


class NonFiniteError(JuliaRandError, ValueError):
    """An iterate or weight overflowed or became NaN."""


class BracketError(JuliaRandError, ValueError):
    """A root bracket does not straddle a sign change."""


class ConvergenceError(JuliaRandError, RuntimeError):
    """An iterative computation hit its depth cap before converging."""


class ResourceLimitError(JuliaRandError, RuntimeError):
    """A request would exceed a hard enumeration or memory cap."""
