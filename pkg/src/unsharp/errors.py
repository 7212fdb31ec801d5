"""Exception hierarchy shared by every module."""


class UnsharpError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(UnsharpError, ValueError):
    """Operands have incompatible or unsupported shapes."""


class CapacityError(UnsharpError, ValueError):
    """A construction would exceed the supported Hilbert-space dimension."""


class ValidationError(UnsharpError, ValueError):
    """An object violates one of its defining invariants.

    ``invariant`` names the violated condition and ``deviation`` carries the
    measured size of the violation when one makes sense.
    """

    def __init__(self, message, *, invariant=None, deviation=None, failures=()):
        super().__init__(message)
        self.invariant = invariant
        self.deviation = deviation
        self.failures = tuple(failures)


class CoexistenceError(UnsharpError, ValueError):
    """Operation requires jointly measurable (commuting) inputs."""


class ConditioningError(UnsharpError, ValueError):
    """Conditioning on an outcome whose probability is numerically zero."""


class ScenarioError(UnsharpError):
    """Scenario document is syntactically malformed."""


class ConsistencyError(UnsharpError, RuntimeError):
    """Internal numbers disagree beyond tolerance (e.g. probabilities not summing to 1)."""
