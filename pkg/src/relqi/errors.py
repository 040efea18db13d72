"""Exception hierarchy.

Input problems derive from :class:`ValidationError` (a ``ValueError``);
numerical breakdowns derive from :class:`NumericalError`. The CLI maps the
first family to exit status 1 and the second to exit status 2.
"""


class RelqiError(Exception):
    """Base class for all library errors."""


class ValidationError(RelqiError, ValueError):
    """Input violates a documented precondition."""


class RangeError(ValidationError):
    """Parameter outside the supported numeric range."""


class DegenerateMomentumError(ValidationError):
    """Momentum is zero where a direction or energy is required."""


class UnsupportedMapError(ValidationError):
    """Bogoliubov map cannot be applied to the given state description."""


class InvalidOverlapError(ValidationError):
    """Mode-overlap matrices violate the completeness condition."""


class NumericalError(RelqiError, ArithmeticError):
    """Computation broke down numerically."""


class SingularityError(NumericalError):
    """A normalisation denominator vanished."""


class TruncationError(NumericalError):
    """Fock-space truncation lost more norm than tolerated."""


class FrameInvarianceError(NumericalError):
    """Detector statistics differ between frames beyond tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
