"""Cost-minimizing schedule computation for every constraint family.

Slice-bound offers are solved separably, total-energy offers by an exact
greedy fill that coincides with the LP optimum, dependency offers by the
dense simplex over the stacked halfspace system, and uncertain offers by
thresholding the probability functions and reducing to the bounded
cases.  Per-slice price bands act as participation gates in the
separable paths: a slice whose market price falls outside its band is
pinned to its lower bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import simplex
from .errors import ShapeError, UnsupportedInstanceError
from .model import (
    EnergyBounds,
    FlexOffer,
    Schedule,
    ScheduleKind,
    ScheduleSlice,
    unit_expand,
)
from .uncertain import threshold_intervals

PriceCurve = Sequence[float]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class OptimizationResult:
    status: str
    schedule: Optional[Schedule]
    objective: Optional[float]

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


_INFEASIBLE = OptimizationResult(INFEASIBLE, None, None)


def optimize(fo: FlexOffer, prices: PriceCurve, p0: float = 1.0) -> OptimizationResult:
    """Dispatch on the offer's constraint family."""
    if fo.uncertain is not None:
        return optimize_ufo(fo, prices, p0)
    if fo.dependency is not None:
        return optimize_dfo(fo, prices)
    if fo.total_energy is not None:
        return optimize_tecfo(fo, prices)
    return optimize_sfo(fo, prices)


def optimize_sfo(fo: FlexOffer, prices: PriceCurve) -> OptimizationResult:
    """Separable minimum over per-slice bounds with participation gates."""
    p = _checked_prices(fo, prices)
    lo = np.array([c.energy.lower for c in fo.profile])
    hi = np.array([c.energy.upper for c in fo.profile])
    pinned = _gated(fo, p)
    e = np.where((p < 0.0) & ~pinned, hi, lo)
    return _result(fo, e, p)


def optimize_tecfo(fo: FlexOffer, prices: PriceCurve) -> OptimizationResult:
    """Exact greedy solution of the slice-bounds + total-energy LP.

    Starts at the separable optimum, then fills the cheapest slack (ties
    to the lowest index) up to the total minimum, or drains the least
    regretful surplus down to the total maximum.
    """
    if fo.total_energy is None:
        raise ValueError("offer has no total energy constraint")
    p = _checked_prices(fo, prices)
    lo = np.array([c.energy.lower for c in fo.profile])
    hi = np.array([c.energy.upper for c in fo.profile])
    te = fo.total_energy
    if te.lower > hi.sum() + 1e-12 or te.upper < lo.sum() - 1e-12:
        return _INFEASIBLE

    e = np.where(p < 0.0, hi, lo)
    total = float(e.sum())
    if total < te.lower:
        deficit = te.lower - total
        for t in sorted(range(len(e)), key=lambda i: (p[i], i)):
            room = hi[t] - e[t]
            if room <= 0.0:
                continue
            add = min(room, deficit)
            e[t] += add
            deficit -= add
            if deficit <= 1e-15:
                break
    elif total > te.upper:
        surplus = total - te.upper
        for t in sorted(range(len(e)), key=lambda i: (-p[i], i)):
            room = e[t] - lo[t]
            if room <= 0.0:
                continue
            cut = min(room, surplus)
            e[t] -= cut
            surplus -= cut
            if surplus <= 1e-15:
                break
    return _result(fo, e, p)


def optimize_dfo(fo: FlexOffer, prices: PriceCurve) -> OptimizationResult:
    """LP over the stacked halfspace system (plus bounds and total energy)."""
    if fo.dependency is None:
        raise ValueError("offer has no dependency constraints")
    p = _checked_prices(fo, prices)
    return solve_lp(fo, p)


def solve_lp(fo: FlexOffer, prices: PriceCurve) -> OptimizationResult:
    """Simplex solution over every linear constraint the offer carries."""
    p = _checked_prices(fo, prices)
    a, b = constraint_system(fo)
    res = simplex.solve(p, a, b)
    if res.status == simplex.INFEASIBLE:
        return _INFEASIBLE
    if res.status == simplex.UNBOUNDED:
        raise UnsupportedInstanceError("objective is unbounded over the offer")
    return _result(fo, res.x, p)


def constraint_system(fo: FlexOffer) -> tuple[np.ndarray, np.ndarray]:
    """All constraints as one A e <= b system over the slice energies."""
    n = fo.slice_count
    rows: list[np.ndarray] = []
    rhs: list[float] = []

    def add(coeffs: np.ndarray, bound: float) -> None:
        rows.append(coeffs)
        rhs.append(bound)

    for t, c in enumerate(fo.profile):
        unit = np.zeros(n)
        unit[t] = 1.0
        add(unit, c.energy.upper)
        add(-unit, -c.energy.lower)
    if fo.total_energy is not None:
        ones = np.ones(n)
        add(ones, fo.total_energy.upper)
        add(-ones, -fo.total_energy.lower)
    if fo.dependency is not None:
        for t, matrix in enumerate(fo.dependency):
            for a_coef, b_coef, c_coef in matrix.rows:
                coeffs = np.zeros(n)
                coeffs[:t] = a_coef
                coeffs[t] = b_coef
                add(coeffs, c_coef)
    return np.vstack(rows), np.array(rhs)


def optimize_ufo(fo: FlexOffer, prices: PriceCurve, p0: float = 1.0) -> OptimizationResult:
    """Threshold the probability functions at p0, then optimize the
    resulting interval structure.

    Single intervals reduce to the separable case; unions couple only
    through a total-energy constraint, in which case interval choices
    are enumerated (bounded instances only).
    """
    if fo.uncertain is None:
        raise ValueError("offer has no uncertainty constraints")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("probability threshold must lie in [0, 1]")
    p = _checked_prices(fo, prices)
    per_slice: list[list[EnergyBounds]] = []
    for func in fo.uncertain:
        intervals = threshold_intervals(func, p0)
        if not intervals:
            return _INFEASIBLE
        per_slice.append(intervals)

    pinned = _gated(fo, p)
    if fo.total_energy is None:
        e = np.empty(fo.slice_count)
        for t, intervals in enumerate(per_slice):
            if pinned[t] or p[t] >= 0.0:
                e[t] = intervals[0].lower
            else:
                e[t] = intervals[-1].upper
        return _result(fo, e, p)

    width = max(len(iv) for iv in per_slice)
    if fo.slice_count * width > 20:
        raise UnsupportedInstanceError(
            "too many threshold-interval combinations to enumerate"
        )
    best: OptimizationResult = _INFEASIBLE
    for combo in itertools.product(*per_slice):
        sub = _with_bounds(fo, combo)
        res = optimize_tecfo(sub, p)
        if res.optimal and (not best.optimal or res.objective < best.objective - 1e-15):
            best = res
    return best


def schedule_cost(schedule: Schedule, prices: PriceCurve) -> float:
    """Cost of a schedule at the given unit prices."""
    energies = unit_expand(schedule).energies()
    if len(energies) != len(prices):
        raise ShapeError(
            f"schedule has {len(energies)} unit slices, price curve has {len(prices)}"
        )
    return float(np.dot(energies, np.asarray(prices, dtype=float)))


def _checked_prices(fo: FlexOffer, prices: PriceCurve) -> np.ndarray:
    p = np.asarray(prices, dtype=float)
    if p.shape != (fo.slice_count,):
        raise ShapeError(
            f"price curve has {p.size} entries, offer has {fo.slice_count} slices"
        )
    if not np.all(np.isfinite(p)):
        raise ValueError("prices must be finite")
    return p


def _gated(fo: FlexOffer, p: np.ndarray) -> np.ndarray:
    pinned = np.zeros(fo.slice_count, dtype=bool)
    for t, c in enumerate(fo.profile):
        if c.price is not None and not (c.price.min_price <= p[t] <= c.price.max_price):
            pinned[t] = True
    return pinned


def _with_bounds(fo: FlexOffer, bounds) -> FlexOffer:
    from dataclasses import replace

    profile = tuple(
        replace(c, energy=b, price=None) for c, b in zip(fo.profile, bounds)
    )
    return replace(fo, profile=profile, uncertain=None, dependency=None)


def _result(fo: FlexOffer, energies: np.ndarray, prices: np.ndarray) -> OptimizationResult:
    objective = float(np.dot(energies, prices))
    slices = tuple(
        ScheduleSlice(duration=1, energy_amount=float(e), price=float(p))
        for e, p in zip(energies, prices)
    )
    schedule = Schedule(
        start_time=fo.start_after_time,
        slices=slices,
        schedule_id=0,
        update_id=0,
        kind=ScheduleKind.FLEXOFFER,
    )
    return OptimizationResult(OPTIMAL, schedule, objective)
