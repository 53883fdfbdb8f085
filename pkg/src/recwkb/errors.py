"""Exception types raised across the package."""


class RecwkbError(Exception):
    """Base class for all package errors."""


class NearZeroDivisor(RecwkbError):
    """Pointwise division attempted with a divisor too close to zero."""


class BranchAmbiguity(RecwkbError):
    """A continuous logarithm branch cannot be fixed (value near/around 0)."""


class OrderOverflow(RecwkbError):
    """Requested expansion order exceeds what the representation supports."""


class ParseError(RecwkbError):
    """Problem-description text failed to parse.

    Carries line/column of the offending token when available.
    """

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class NonsingularityViolation(RecwkbError):
    """An endpoint coefficient of the recurrence vanishes on the interval."""


class UnknownPreset(RecwkbError):
    """Preset name not recognized."""


class LeadingCoefficientVanishes(RecwkbError):
    """Characteristic polynomial has (numerically) vanishing leading coefficient."""


class BranchJumpDetected(RecwkbError):
    """Root continuation could not keep branches continuous on the given grid."""


class NonGenericCrossing(RecwkbError):
    """Root gap does not scale like sqrt(|x - x*|) near the candidate crossing."""

    def __init__(self, message, exponent=None):
        self.exponent = exponent
        super().__init__(message)


class DegenerateTheta(RecwkbError):
    """Airy scale constant undefined: numerator or denominator too small."""


class OutOfRange(RecwkbError):
    """Argument outside the supported evaluation envelope."""


class WindowEmpty(RecwkbError):
    """Matching window contains no integer steps for this epsilon."""


class IllConditionedFit(RecwkbError):
    """Least-squares system too ill-conditioned to trust."""


class CoefficientVanishes(RecwkbError):
    """A recurrence coefficient vanished at a specific step during iteration."""

    def __init__(self, message, k=None):
        self.k = k
        super().__init__(message)


class CoincidentNodes(RecwkbError):
    """Vandermonde nodes are not pairwise distinct."""


class InsufficientDecades(RecwkbError):
    """Epsilon list does not span enough decades for a trustworthy slope fit."""


class DenominatorTooSmall(RecwkbError):
    """Transport denominator close to zero: expansion invalid (near a crossing)."""


class DegeneracyMismatch(RecwkbError):
    """Characteristic roots do not cluster at 1 with a common integer rate."""


class SeparationFailure(RecwkbError):
    """Degeneracy profiles Q_m not separated from each other or from zero."""
