"""Exception types raised by the library.

Every error derives from KrflowError so callers can catch the whole family;
names follow the operation contracts (one class per distinct failure mode).
"""


class KrflowError(Exception):
    """Base class for all library errors."""


# --- radial metric construction ---

class NonPositiveC0(KrflowError, ValueError):
    """Normalization constant h(0) must be positive."""


class NonPositiveH(KrflowError, ValueError):
    """Metric coefficient h must be positive on the whole grid."""


class DivergentIntegrand(KrflowError, ValueError):
    """xi/s is not integrable at the origin (slope cap exceeded)."""


class OutOfDomain(KrflowError, ValueError):
    """Requested radius lies outside the grid domain."""


class GridMismatch(KrflowError, ValueError):
    """Operation requires both profiles to share one grid."""


# --- curvature ---

class DimensionTooSmall(KrflowError, ValueError):
    """B and C curvature components require complex dimension n >= 2."""


class StencilOutOfDomain(KrflowError, ValueError):
    """Finite-difference stencil would leave the resolved radius range."""


# --- classification ---

class IncompleteMetric(KrflowError, ValueError):
    """Volume-growth classification requires a complete metric."""


# --- flow ---

class StabilityViolation(KrflowError, RuntimeError):
    """Time step produced a non-positive or non-finite metric; dt too large."""


class BlowUp(KrflowError, RuntimeError):
    """Equivalence constant to the initial metric exceeded the guard bound."""


class TimeNotStored(KrflowError, KeyError):
    """Requested time is not one of the trajectory's stored output times."""


class BallOutOfDomain(KrflowError, ValueError):
    """Geodesic ball extends beyond the resolved radius range."""


class NonPositiveEpsilon(KrflowError, ValueError):
    """Existence-horizon formula needs epsilon > 0."""


# --- comparison constructions ---

class InvalidK(KrflowError, ValueError):
    """Pullback factor k must be >= 1."""


class InvalidC1Parameters(KrflowError, ValueError):
    """Equivalence bounds need 0 <= alpha <= beta < 1, gamma >= 0, k >= 1."""


class NotC2(KrflowError, ValueError):
    """Operation requires a metric satisfying condition (c2)."""


class NoKFound(KrflowError, RuntimeError):
    """No pullback factor k <= 2**60 satisfies the comparison condition."""


class DomainTooShort(KrflowError, RuntimeError):
    """Grid tail cannot fit the first sign change of the bump integral."""


class XiAtOne(KrflowError, ValueError):
    """Truncation radius must have xi(r_k) < 1."""


class NotC1OrC2(KrflowError, ValueError):
    """Comparison metric assembly requires condition (c1) or (c2)."""


class HypothesisViolated(KrflowError, ValueError):
    """Input metric does not satisfy the convergent-tail hypothesis."""


class CandidateCurvatureTooLarge(KrflowError, ValueError):
    """Candidate metric exceeds the unit bisectional-curvature bound."""


class InvalidParams(KrflowError, ValueError):
    """Preset or operation parameters are out of their allowed range."""


# --- configuration and persistence ---

class UnknownPreset(KrflowError, ValueError):
    """Preset name not in the registry."""


class ParseError(KrflowError, ValueError):
    """Config text line could not be parsed."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownKey(KrflowError, ValueError):
    """Config key is not part of the schema."""


class OutOfRange(KrflowError, ValueError):
    """Config value violates its allowed range."""


class IoError(KrflowError, OSError):
    """File could not be written or read."""


class VersionMismatch(KrflowError, ValueError):
    """Snapshot format version is not supported."""


class CorruptSnapshot(KrflowError, ValueError):
    """Snapshot failed its checksum or structural validation."""
