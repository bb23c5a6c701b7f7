"""Exception types shared across the toolkit."""


class FlexError(Exception):
    """Base class for all flexkit errors."""


class ValidationError(FlexError):
    """An invariant or mandatory-field requirement is violated."""


class ShapeError(ValidationError):
    """Two containers that must agree in length do not."""


class InvalidTransitionError(FlexError):
    """A lifecycle event is not allowed in the current state."""


class UnsupportedInstanceError(FlexError):
    """The instance is valid but outside the supported problem class."""


class GenerationError(FlexError):
    """A device model cannot produce a feasible flex offer."""


class DisaggregationError(FlexError):
    """An aggregate schedule cannot be split into member-feasible schedules."""
