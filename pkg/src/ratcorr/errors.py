"""Exception types shared across the package."""


class RatCorrError(Exception):
    """Base class for all package errors."""


class CapExceeded(RatCorrError):
    """A configured size cap (atoms, words, degree) would be exceeded."""


class RootFindingError(RatCorrError):
    """The simultaneous root iteration did not reach the residual target."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class UnreducedMapError(RatCorrError):
    """Numerator and denominator share a root, so a point maps to [0:0]."""


class CaseASuspicion(RatCorrError):
    """No chart puts infinity away from the sample and its images.

    This is what happens when J(S) together with its generator images
    (numerically) fills the sphere.
    """


class ConfigError(RatCorrError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class PoleOnSample(RatCorrError):
    """A generator has a pole on (or the chart puts infinity in) the Julia sample."""
