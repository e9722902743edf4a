"""Exception types raised across the package."""


class ResonanceError(Exception):
    """Base class for all package errors."""


class InvalidParameter(ResonanceError, ValueError):
    pass


class PoleAtPoint(ResonanceError):
    pass


class AffineGenerator(ResonanceError):
    """The isometric disk of an affine map is not bounded."""


class PoleInsideInterval(ResonanceError):
    pass


class OverlappingDisks(ResonanceError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NoConvergence(ResonanceError):
    pass


class ContainmentViolation(ResonanceError):
    pass


class NonpositiveDerivative(ResonanceError):
    pass


class DimensionCap(ResonanceError):
    pass


class Overflow(ResonanceError):
    pass


class EnumerationCap(ResonanceError):
    pass


class NonHyperbolicWord(ResonanceError):
    pass


class Diverged(ResonanceError):
    """Newton iteration from a seed did not produce a zero."""


class AmbiguousWinding(ResonanceError):
    pass


class ConfigError(ResonanceError, ValueError):
    pass
