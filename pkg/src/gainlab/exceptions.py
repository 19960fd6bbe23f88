"""Exception types shared across the package."""


class GainlabError(Exception):
    """Base class for all gainlab errors."""


class DimensionMismatch(GainlabError, ValueError):
    """Operands have incompatible or non-square shapes."""


class InvalidParameter(GainlabError, ValueError):
    """A configuration value or matrix violates its documented constraints."""


class NotPositiveDefinite(GainlabError, ValueError):
    """A matrix required to be a valid covariance failed SPD validation."""


class LineSearchFailed(GainlabError, RuntimeError):
    """No acceptable step was found above the minimum step size."""
