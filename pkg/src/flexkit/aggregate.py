"""Pool aggregation and exact disaggregation.

Members are aligned at their earliest start; the aggregate's per-unit
bounds are the sums of the aligned member bounds, and its total-energy
band is the sum of member bands when every member has one.  Fixing each
member at its earliest start sacrifices the pool's time flexibility;
that is the aggregation loss of this baseline.

Disaggregation splits each unit's energy proportionally to the members'
spans, clamped to their bounds.  When members carry total-energy bands
the split additionally tracks the remaining band per member; a simplex
feasibility fallback covers the rare instances the greedy cannot place.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass

import numpy as np

from . import simplex
from .errors import DisaggregationError, UnsupportedInstanceError, ValidationError
from .model import (
    EnergyBounds,
    FlexOffer,
    LifecycleState,
    Schedule,
    ScheduleKind,
    ScheduleSlice,
    SliceConstraint,
    check_schedule,
    unit_expand,
)

_NAMESPACE = uuid.UUID("8a2b6f0e-1df4-4cba-9e96-34a4a0e1c1aa")


@dataclass(frozen=True)
class MemberSlot:
    """One pool member and its alignment offset inside the aggregate."""

    fo: FlexOffer
    offset: int

    @property
    def member_id(self) -> str:
        return self.fo.id


@dataclass(frozen=True)
class AggregateBinding:
    aggregate_fo: FlexOffer
    members: tuple[MemberSlot, ...]


def aggregate(fos) -> AggregateBinding:
    """Combine slice-bound / total-energy offers into a single offer."""
    fos = list(fos)
    if not fos:
        raise ValidationError("cannot aggregate an empty pool")
    nspi = fos[0].num_seconds_per_interval
    for fo in fos:
        if fo.dependency is not None or fo.uncertain is not None:
            raise UnsupportedInstanceError(
                "dependency and uncertain offers cannot be aggregated"
            )
        if fo.num_seconds_per_interval != nspi:
            raise ValidationError("members must share numSecondsPerInterval")

    starts = [_start_interval(fo) for fo in fos]
    base = min(starts)
    slots = tuple(
        MemberSlot(fo=fo, offset=start - base) for fo, start in zip(fos, starts)
    )
    horizon = max(slot.offset + slot.fo.slice_count for slot in slots)

    lower = np.zeros(horizon)
    upper = np.zeros(horizon)
    for slot in slots:
        for t, c in enumerate(slot.fo.profile):
            lower[slot.offset + t] += c.energy.lower
            upper[slot.offset + t] += c.energy.upper

    total = None
    if all(fo.total_energy is not None for fo in fos):
        total = EnergyBounds(
            lower=sum(fo.total_energy.lower for fo in fos),
            upper=sum(fo.total_energy.upper for fo in fos),
        )

    anchor = min(
        (fo for fo in fos if _start_interval(fo) == base),
        key=lambda fo: fo.start_after_time,
    )
    agg_id = str(uuid.uuid5(_NAMESPACE, ",".join(fo.id for fo in fos)))
    aggregate_fo = FlexOffer(
        id=agg_id,
        state=LifecycleState.INITIAL,
        creation_time=max(fo.creation_time for fo in fos),
        offered_by_id="aggregator",
        start_after_time=anchor.start_after_time,
        start_before_time=anchor.start_after_time,
        num_seconds_per_interval=nspi,
        profile=tuple(
            SliceConstraint(energy=EnergyBounds(float(lo), float(hi)))
            for lo, hi in zip(lower, upper)
        ),
        total_energy=total,
    )
    return AggregateBinding(aggregate_fo=aggregate_fo, members=slots)


def disaggregate(
    binding: AggregateBinding, schedule: Schedule, tolerance: float = 1e-9
) -> list[tuple[str, Schedule]]:
    """Split an aggregate schedule into member schedules whose per-unit
    energies sum exactly to the aggregate's."""
    agg = binding.aggregate_fo
    report = check_schedule(agg, schedule, tolerance)
    if not report.feasible:
        raise DisaggregationError(
            "aggregate schedule is infeasible: "
            + "; ".join(v.message for v in report.violations)
        )
    expanded = unit_expand(schedule)
    energy = np.array(expanded.energies())
    prices = [s.price for s in expanded.slices]
    horizon = agg.slice_count
    members = binding.members
    m = len(members)

    lo = np.zeros((m, horizon))
    hi = np.zeros((m, horizon))
    active = np.zeros((m, horizon), dtype=bool)
    te_lo = np.full(m, -np.inf)
    te_hi = np.full(m, np.inf)
    for i, slot in enumerate(members):
        span = slice(slot.offset, slot.offset + slot.fo.slice_count)
        lo[i, span] = [c.energy.lower for c in slot.fo.profile]
        hi[i, span] = [c.energy.upper for c in slot.fo.profile]
        active[i, span] = True
        if slot.fo.total_energy is not None:
            te_lo[i] = slot.fo.total_energy.lower
            te_hi[i] = slot.fo.total_energy.upper

    if np.all(np.isinf(te_lo)) and np.all(np.isinf(te_hi)):
        shares = _proportional_split(energy, lo, hi, tolerance)
    else:
        shares = _tracked_split(energy, lo, hi, te_lo, te_hi, tolerance)
        if shares is None:
            shares = _lp_split(energy, lo, hi, active, te_lo, te_hi)

    return [
        (
            slot.member_id,
            _member_schedule(slot, shares[i], prices),
        )
        for i, slot in enumerate(members)
    ]


def _proportional_split(energy, lo, hi, tolerance) -> np.ndarray:
    """Per-unit proportional fill; exact conservation via dust correction."""
    span = hi - lo
    span_sum = span.sum(axis=0)
    surplus = energy - lo.sum(axis=0)
    if np.any(surplus < -tolerance) or np.any(surplus > span_sum + tolerance):
        raise DisaggregationError("aggregate schedule outside summed member bounds")
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span_sum > 0.0, surplus / np.where(span_sum == 0, 1.0, span_sum), 0.0)
    shares = lo + span * frac
    dust = energy - shares.sum(axis=0)
    anchor = np.argmax(span, axis=0)
    shares[anchor, np.arange(shares.shape[1])] += dust
    return shares


def _tracked_split(energy, lo, hi, te_lo, te_hi, tolerance) -> np.ndarray | None:
    """Unit-by-unit proportional split tracking each member's remaining
    total-energy band.  Returns None when it cannot place a unit."""
    m, horizon = lo.shape
    col_lo_sum = lo.sum(axis=0)
    col_hi_sum = hi.sum(axis=0)
    eff_lo = np.maximum(lo, energy[None, :] - (col_hi_sum[None, :] - hi))
    eff_hi = np.minimum(hi, energy[None, :] - (col_lo_sum[None, :] - lo))
    if np.any(eff_lo > eff_hi + tolerance):
        return None
    eff_lo = np.minimum(eff_lo, eff_hi)
    # suffix sums of future effective bounds
    fut_lo = np.zeros((m, horizon))
    fut_hi = np.zeros((m, horizon))
    if horizon > 1:
        fut_lo[:, :-1] = np.cumsum(eff_lo[:, ::-1], axis=1)[:, ::-1][:, 1:]
        fut_hi[:, :-1] = np.cumsum(eff_hi[:, ::-1], axis=1)[:, ::-1][:, 1:]

    shares = np.zeros((m, horizon))
    allocated = np.zeros(m)
    for t in range(horizon):
        unit_lo = np.maximum(eff_lo[:, t], te_lo - allocated - fut_hi[:, t])
        unit_hi = np.minimum(eff_hi[:, t], te_hi - allocated - fut_lo[:, t])
        if np.any(unit_lo > unit_hi + tolerance):
            return None
        unit_lo = np.minimum(unit_lo, unit_hi)
        surplus = energy[t] - unit_lo.sum()
        span = unit_hi - unit_lo
        if surplus < -tolerance or surplus > span.sum() + tolerance:
            return None
        frac = 0.0 if span.sum() <= 0.0 else min(1.0, surplus / span.sum())
        a = unit_lo + span * frac
        a[np.argmax(span)] += energy[t] - a.sum()
        shares[:, t] = a
        allocated += a
    bad = (allocated < te_lo - 1e-7) | (allocated > te_hi + 1e-7)
    if np.any(bad):
        return None
    return shares


def _lp_split(energy, lo, hi, active, te_lo, te_hi) -> np.ndarray:
    """Feasibility LP over the active cells (zero objective)."""
    m, horizon = lo.shape
    cells = [(i, t) for i in range(m) for t in range(horizon) if active[i, t]]
    index = {cell: k for k, cell in enumerate(cells)}
    n = len(cells)
    rows, rhs = [], []
    for t in range(horizon):
        row = np.zeros(n)
        for i in range(m):
            if active[i, t]:
                row[index[(i, t)]] = 1.0
        rows.extend([row, -row])
        rhs.extend([energy[t], -energy[t]])
    for k, (i, t) in enumerate(cells):
        unit = np.zeros(n)
        unit[k] = 1.0
        rows.extend([unit, -unit])
        rhs.extend([hi[i, t], -lo[i, t]])
    for i in range(m):
        if np.isfinite(te_lo[i]) or np.isfinite(te_hi[i]):
            row = np.zeros(n)
            for t in range(horizon):
                if active[i, t]:
                    row[index[(i, t)]] = 1.0
            if np.isfinite(te_hi[i]):
                rows.append(row)
                rhs.append(te_hi[i])
            if np.isfinite(te_lo[i]):
                rows.append(-row)
                rhs.append(-te_lo[i])
    res = simplex.solve(np.zeros(n), np.vstack(rows), np.array(rhs))
    if res.status != simplex.OPTIMAL:
        raise DisaggregationError(
            "no member-feasible split exists for this aggregate schedule"
        )
    shares = np.zeros((m, horizon))
    for k, (i, t) in enumerate(cells):
        shares[i, t] = res.x[k]
    # restore exact per-unit conservation lost to simplex round-off
    dust = energy - shares.sum(axis=0)
    counts = active.sum(axis=0)
    anchor = np.argmax(active, axis=0)
    shares[anchor, np.arange(horizon)] += np.where(counts > 0, dust, 0.0)
    return shares


def _member_schedule(slot: MemberSlot, share_row: np.ndarray, prices) -> Schedule:
    window = range(slot.offset, slot.offset + slot.fo.slice_count)
    slices = tuple(
        ScheduleSlice(duration=1, energy_amount=float(share_row[t]), price=prices[t])
        for t in window
    )
    return Schedule(
        start_time=slot.fo.start_after_time,
        slices=slices,
        schedule_id=0,
        update_id=0,
        kind=ScheduleKind.FLEXOFFER,
    )


def _start_interval(fo: FlexOffer) -> int:
    if fo.start_after_interval is not None:
        return fo.start_after_interval
    return fo.interval_of(fo.start_after_time)
