"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SensorSynthError(Exception):
    """Base class for all errors raised by sensorsynth."""


class ValidationError(SensorSynthError, ValueError):
    """A structure failed its invariants (malformed graph, problem or plan)."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class CoverError(SensorSynthError, ValueError):
    """A cover or sensor map violates its invariants."""


class MappingError(SensorSynthError, LookupError):
    """A reading index does not name a block of the cover."""


class SpecificationError(SensorSynthError, ValueError):
    """A constraint specification is inconsistent with the request."""


class InputError(SensorSynthError, ValueError):
    """Bad numeric input, e.g. cells that do not partition a space."""


class StipulationError(SensorSynthError, ValueError):
    """A belief stipulation could not be parsed or validated."""


class NotASolutionError(SensorSynthError, LookupError):
    """The requested cover is not covered by any synthesized solution."""


class ResourceError(SensorSynthError):
    """A configured budget was exceeded.

    ``cap`` names the budget (e.g. ``"max_tree_vertices"``) and ``where``
    optionally identifies the vertex or operation that hit it.
    """

    def __init__(self, cap, limit, where=None):
        self.cap = cap
        self.limit = limit
        self.where = where
        msg = f"budget {cap}={limit} exceeded"
        if where is not None:
            msg += f" at {where}"
        super().__init__(msg)
