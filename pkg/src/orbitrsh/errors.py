"""Exception types raised across the package."""


class OrbitError(Exception):
    """Base class for all errors raised by orbitrsh."""


class PreconditionError(OrbitError, ValueError):
    """An operation was called outside its documented domain."""


class DepthExhausted(OrbitError):
    """An odometer query needs more digits than the point or system stores."""


class BudgetExceeded(OrbitError):
    """An iteration count exceeds twice the configured return horizon."""


class EmptyRegion(OrbitError):
    """Sampling was requested from a region without interior."""


class PointOutsideDomain(OrbitError):
    """A point does not lie in the domain of the chart tuple it was paired with."""


class NoChartCoversPoint(OrbitError):
    """No chart tuple of the requested length contains the point with margin."""


class LevelMismatch(OrbitError):
    """Sections or tuples of incompatible tensor levels were combined."""


class MaxReturnExceeded(OrbitError):
    """Some point of Y did not return within the configured horizon."""


class BoundaryAmbiguous(OrbitError):
    """An endpoint comparison fell inside the geometric tolerance band."""


class ItinerarySumMismatch(OrbitError):
    """Return times along a boundary itinerary overshoot the tower height."""


class SizeMismatch(OrbitError):
    """Matrix fields of different sizes were combined."""


class DomainMismatch(OrbitError):
    """Matrix fields over different base regions were combined."""


class InhomogeneousWord(OrbitError):
    """A gauge check was requested for a word without a single degree."""


class StructureMismatch(OrbitError):
    """A target field does not have the requested band structure."""


class VanishingPreconditionViolated(OrbitError):
    """A target field does not vanish where a lift requires it to."""
