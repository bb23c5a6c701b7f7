"""Core flex-offer domain types and schedule feasibility checking.

A flex offer describes an energy load's leeway as constraints over
per-time-unit energy amounts: per-slice bounds, an optional total-energy
band, optional per-slice halfspace systems coupling a slice to the
cumulative consumption before it, and optional per-slice probability
functions.  All types are immutable values; validation happens at
construction time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import TYPE_CHECKING, Any, Optional

from . import geometry
from .errors import ShapeError, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .uncertain import UncertainFunction

#: Default slack applied to every inequality check, in the constraint's
#: own unit.  Absorbs float round-trips through the message codec.
DEFAULT_TOLERANCE = 1e-9

#: Default duration of one time unit in seconds.
DEFAULT_SECONDS_PER_INTERVAL = 900


class LifecycleState(str, enum.Enum):
    INITIAL = "initial"
    OFFERED = "offered"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    ASSIGNED = "assigned"
    EXECUTED = "executed"
    INVALID = "invalid"
    CANCELED = "canceled"


class ScheduleKind(str, enum.Enum):
    DEFAULT = "default"
    FLEXOFFER = "flexoffer"


@dataclass(frozen=True)
class GeoLocation:
    longitude: float
    latitude: float


@dataclass(frozen=True)
class EnergyBounds:
    """Closed interval [lower, upper]; used for kWh and EUR bands alike."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValidationError("bounds must be finite")
        if self.lower > self.upper:
            raise ValidationError(
                f"lower bound {self.lower} exceeds upper bound {self.upper}"
            )

    @property
    def span(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tolerance: float = DEFAULT_TOLERANCE) -> bool:
        return self.lower - tolerance <= value <= self.upper + tolerance


@dataclass(frozen=True)
class PriceBounds:
    min_price: float
    max_price: float

    def __post_init__(self):
        if self.min_price > self.max_price:
            raise ValidationError("min price exceeds max price")


@dataclass(frozen=True)
class SliceConstraint:
    """Constraints for one time unit of the profile."""

    energy: EnergyBounds
    price: Optional[PriceBounds] = None
    min_duration: int = 1
    max_duration: int = 1

    def __post_init__(self):
        if self.min_duration < 1 or self.max_duration < 1:
            raise ValidationError("durations must be positive")
        if self.min_duration > self.max_duration:
            raise ValidationError("min duration exceeds max duration")


@dataclass(frozen=True)
class HalfspaceMatrix:
    """Rows (a, b, c) meaning a*x + b*y <= c over x = cumulative energy
    consumed before the slice and y = the slice's energy."""

    rows: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        if not rows:
            raise ValidationError("halfspace matrix needs at least one row")
        if any(len(row) != 3 for row in rows):
            raise ValidationError("halfspace rows must be [a, b, c] triples")
        if not any(r[1] > 0 for r in rows) or not any(r[1] < 0 for r in rows):
            raise ValidationError("slice energy is unbounded in the halfspace system")
        object.__setattr__(self, "rows", rows)

    def violated_rows(
        self, x: float, y: float, tolerance: float = DEFAULT_TOLERANCE
    ) -> tuple[tuple[float, float, float], ...]:
        return tuple(
            (a, b, c) for a, b, c in self.rows if a * x + b * y > c + tolerance
        )

    def satisfies(self, x: float, y: float, tolerance: float = DEFAULT_TOLERANCE) -> bool:
        return not self.violated_rows(x, y, tolerance)

    def y_bounds(self) -> EnergyBounds:
        """Global range of the slice energy over the whole polygon."""
        lo, hi = geometry.y_range(self.rows)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("dependency polygon is unbounded in slice energy")
        return EnergyBounds(lo, hi)

    def x_bounds(self) -> tuple[float, float]:
        return geometry.x_range(self.rows)


@dataclass(frozen=True)
class ScheduleSlice:
    duration: int
    energy_amount: float
    price: Optional[float] = None

    def __post_init__(self):
        if self.duration < 1:
            raise ValidationError("slice duration must be positive")
        if not math.isfinite(self.energy_amount):
            raise ValidationError("slice energy amount must be finite")


@dataclass(frozen=True)
class Schedule:
    start_time: datetime
    slices: tuple[ScheduleSlice, ...]
    schedule_id: int = 0
    update_id: int = 0
    kind: ScheduleKind = ScheduleKind.DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        if not self.slices:
            raise ValidationError("schedule consists of at least one slice")

    @property
    def total_energy(self) -> float:
        return sum(s.energy_amount for s in self.slices)

    def energies(self) -> tuple[float, ...]:
        return tuple(s.energy_amount for s in self.slices)


def unit_expand(schedule: Schedule) -> Schedule:
    """Split multi-unit slices into unit slices of energy_amount/duration."""
    if all(s.duration == 1 for s in schedule.slices):
        return schedule
    expanded = []
    for s in schedule.slices:
        for _ in range(s.duration):
            expanded.append(ScheduleSlice(1, s.energy_amount / s.duration, s.price))
    return Schedule(
        start_time=schedule.start_time,
        slices=tuple(expanded),
        schedule_id=schedule.schedule_id,
        update_id=schedule.update_id,
        kind=schedule.kind,
    )


def epoch_interval(moment: datetime, num_seconds_per_interval: int) -> int:
    """Discrete interval index of a timestamp: floor(epoch / seconds)."""
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return int(math.floor(moment.timestamp())) // num_seconds_per_interval


@dataclass(frozen=True)
class FlexOffer:
    """One flex-offer message: metadata, profile constraints, schedules."""

    id: str
    state: LifecycleState
    creation_time: datetime
    offered_by_id: str
    start_after_time: datetime
    start_before_time: datetime
    profile: tuple[SliceConstraint, ...]
    num_seconds_per_interval: int = DEFAULT_SECONDS_PER_INTERVAL
    state_reason: Optional[str] = None
    creation_interval: Optional[int] = None
    location: Optional[GeoLocation] = None
    accept_before_time: Optional[datetime] = None
    accept_before_interval: Optional[int] = None
    assignment_before_time: Optional[datetime] = None
    assignment_before_interval: Optional[int] = None
    start_after_interval: Optional[int] = None
    start_before_interval: Optional[int] = None
    end_after_time: Optional[datetime] = None
    end_after_interval: Optional[int] = None
    end_before_time: Optional[datetime] = None
    end_before_interval: Optional[int] = None
    total_energy: Optional[EnergyBounds] = None
    total_cost: Optional[EnergyBounds] = None
    dependency: Optional[tuple[HalfspaceMatrix, ...]] = None
    uncertain: Optional[tuple["UncertainFunction", ...]] = None
    price_constraint_start_time: Optional[datetime] = None
    default_schedule: Optional[Schedule] = None
    flexoffer_schedule: Optional[Schedule] = None
    extra: tuple[tuple[str, Any], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "profile", tuple(self.profile))
        if self.dependency is not None:
            object.__setattr__(self, "dependency", tuple(self.dependency))
        if self.uncertain is not None:
            object.__setattr__(self, "uncertain", tuple(self.uncertain))
        object.__setattr__(self, "extra", tuple(self.extra))

        if not self.profile:
            raise ValidationError("profile consists of at least one constraint")
        if self.num_seconds_per_interval <= 0:
            raise ValidationError("numSecondsPerInterval must be positive")
        if self.start_after_time > self.start_before_time:
            raise ValidationError("startAfterTime is after startBeforeTime")
        if self.dependency is not None and self.uncertain is not None:
            raise ValidationError(
                "an offer cannot carry both dependency and uncertainty constraints"
            )
        for name, seq in (("dependency", self.dependency), ("uncertain", self.uncertain)):
            if seq is not None and len(seq) != len(self.profile):
                raise ShapeError(
                    f"{name} constraints must match profile length "
                    f"({len(seq)} != {len(self.profile)})"
                )
        if self.dependency is not None:
            if any(abs(a) > 0 for a, _, _ in self.dependency[0].rows):
                raise ValidationError(
                    "first dependency matrix must not reference prior consumption"
                )
        if self.creation_interval is not None:
            expected = epoch_interval(self.creation_time, self.num_seconds_per_interval)
            if self.creation_interval != expected:
                raise ValidationError(
                    f"creationInterval {self.creation_interval} inconsistent with "
                    f"creationTime (expected {expected})"
                )

    @property
    def slice_count(self) -> int:
        return len(self.profile)

    def interval_of(self, moment: datetime) -> int:
        return epoch_interval(moment, self.num_seconds_per_interval)


def amount_flexibility(fo: FlexOffer, t: int) -> float:
    """Width of the energy band at slice t (1-based)."""
    if not 1 <= t <= fo.slice_count:
        raise IndexError(f"slice index {t} out of range 1..{fo.slice_count}")
    return fo.profile[t - 1].energy.span


def time_flexibility(fo: FlexOffer) -> int:
    """Width of the allowed start window, in time units."""
    if fo.start_after_interval is not None and fo.start_before_interval is not None:
        after, before = fo.start_after_interval, fo.start_before_interval
    else:
        after = fo.interval_of(fo.start_after_time)
        before = fo.interval_of(fo.start_before_time)
    if before < after:
        raise ValidationError("start window inverted")
    return before - after


@dataclass(frozen=True)
class Violation:
    """One violated constraint: where, which family, and the offending row
    for dependency constraints."""

    family: str
    message: str
    slice_index: Optional[int] = None
    row: Optional[tuple[float, float, float]] = None


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.feasible


def check_schedule(
    fo: FlexOffer, schedule: Schedule, tolerance: float = DEFAULT_TOLERANCE
) -> FeasibilityReport:
    """Check a schedule against every constraint family of the offer.

    Multi-unit slices are expanded to unit slices first; the report lists
    every violation, not just the first.
    """
    expanded = unit_expand(schedule)
    energies = expanded.energies()
    if len(energies) != fo.slice_count:
        raise ShapeError(
            f"schedule has {len(energies)} unit slices, profile has {fo.slice_count}"
        )

    violations: list[Violation] = []
    for t, (constraint, e) in enumerate(zip(fo.profile, energies), start=1):
        if not constraint.energy.contains(e, tolerance):
            violations.append(
                Violation(
                    family="slice-bound",
                    message=(
                        f"slice {t}: energy {e:.6f} outside "
                        f"[{constraint.energy.lower:.6f}, {constraint.energy.upper:.6f}]"
                    ),
                    slice_index=t,
                )
            )

    if fo.total_energy is not None:
        total = sum(energies)
        if not fo.total_energy.contains(total, tolerance):
            violations.append(
                Violation(
                    family="total-energy",
                    message=(
                        f"total energy {total:.6f} outside "
                        f"[{fo.total_energy.lower:.6f}, {fo.total_energy.upper:.6f}]"
                    ),
                )
            )

    if fo.dependency is not None:
        cumulative = 0.0
        for t, (matrix, y) in enumerate(zip(fo.dependency, energies), start=1):
            for row in matrix.violated_rows(cumulative, y, tolerance):
                violations.append(
                    Violation(
                        family="dependency",
                        message=(
                            f"slice {t}: row [{row[0]:g}, {row[1]:g}, {row[2]:g}] "
                            f"violated at (x={cumulative:.6f}, y={y:.6f})"
                        ),
                        slice_index=t,
                        row=row,
                    )
                )
            cumulative += y

    return FeasibilityReport(feasible=not violations, violations=tuple(violations))
