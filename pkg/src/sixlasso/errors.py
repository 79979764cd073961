"""Exception types shared across the library.

Each class corresponds to one contract violation; callers that want to
distinguish domain failures from input failures can catch these instead of
bare ValueError.
"""


class SixLassoError(Exception):
    """Base class for all library-specific errors."""


class NonPositiveLambda(SixLassoError):
    """The link constant E[F(Z)Z] came out <= 0.

    Signals a decreasing or degenerate link; the direction-recovery
    guarantees need a positive constant.
    """


class InvalidSparsity(SixLassoError):
    """Requested support size s is outside 1 <= s <= p."""


class LinkRangeError(SixLassoError):
    """A binary link returned a conditional mean outside [-1, 1]."""


class NegativeRadius(SixLassoError):
    """An l1-ball radius was negative."""


class ZeroMatrix(SixLassoError):
    """A design matrix was identically zero where a nonzero one is required."""


class ZeroGradient(SixLassoError):
    """X'y vanished: the data carry no directional information."""


class DimensionTooLarge(SixLassoError):
    """An exhaustive oracle was asked to search more dimensions than it supports."""


class EmptyFeasibleSet(SixLassoError):
    """The requested constraint set contains no points (l1 cap below the sphere radius)."""


class ZeroVector(SixLassoError):
    """A metric received a (numerically) zero vector where a direction is needed."""


class EmptyRecords(SixLassoError):
    """Aggregation was asked to summarize an empty record list."""
