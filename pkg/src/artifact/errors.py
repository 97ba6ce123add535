"""Exception types shared across the package."""


class ArtifactError(Exception):
    """Base class for domain errors raised by this package."""


class CapacityError(ArtifactError):
    """A search space exceeded a configured enumeration cap."""


class PreconditionError(ArtifactError, ValueError):
    """An operation was called outside its stated preconditions."""


class InternalConsistencyError(ArtifactError, AssertionError):
    """Two independent computations disagreed, or an asserted structure is missing."""
