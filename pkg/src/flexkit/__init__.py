"""flexkit: flex-offer modeling, optimization, aggregation and export."""

from .errors import (
    DisaggregationError,
    FlexError,
    GenerationError,
    InvalidTransitionError,
    ShapeError,
    UnsupportedInstanceError,
    ValidationError,
)
from .model import (
    DEFAULT_TOLERANCE,
    EnergyBounds,
    FeasibilityReport,
    FlexOffer,
    GeoLocation,
    HalfspaceMatrix,
    LifecycleState,
    PriceBounds,
    Schedule,
    ScheduleKind,
    ScheduleSlice,
    SliceConstraint,
    Violation,
    amount_flexibility,
    check_schedule,
    time_flexibility,
    unit_expand,
)
from .uncertain import UncertainFunction, evaluate, threshold_intervals
from .codec import parse_message, parse_schedule, serialize_message, serialize_schedule

__all__ = [
    "DEFAULT_TOLERANCE",
    "DisaggregationError",
    "EnergyBounds",
    "FeasibilityReport",
    "FlexError",
    "FlexOffer",
    "GenerationError",
    "GeoLocation",
    "HalfspaceMatrix",
    "InvalidTransitionError",
    "LifecycleState",
    "PriceBounds",
    "Schedule",
    "ScheduleKind",
    "ScheduleSlice",
    "ShapeError",
    "SliceConstraint",
    "UncertainFunction",
    "UnsupportedInstanceError",
    "ValidationError",
    "Violation",
    "amount_flexibility",
    "check_schedule",
    "evaluate",
    "parse_message",
    "parse_schedule",
    "serialize_message",
    "serialize_schedule",
    "threshold_intervals",
    "time_flexibility",
    "unit_expand",
]
