"""Uncertainty functions for probabilistic flex offers.

Each slice of an uncertain offer carries f(e) = clamp(min_i p_i(e), 0, 1)
over an energy domain, where the p_i are polynomials of degree <= 3 given
as ascending coefficient lists.  Thresholding f at a probability yields
the energy intervals available at that confidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .model import EnergyBounds

#: Absolute kWh precision of bisection-located interval endpoints.
ROOT_TOLERANCE = 1e-9

_MAX_DEGREE = 3


@dataclass(frozen=True)
class UncertainFunction:
    """min-of-polynomials probability over an energy domain."""

    domain: EnergyBounds
    polys: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        polys = tuple(tuple(float(c) for c in p) for p in self.polys)
        if not polys:
            raise ValidationError("uncertain function needs at least one polynomial")
        for p in polys:
            if not p:
                raise ValidationError("polynomial needs at least one coefficient")
            if len(p) > _MAX_DEGREE + 1:
                raise ValidationError(f"polynomial degree exceeds {_MAX_DEGREE}")
        object.__setattr__(self, "polys", polys)


def evaluate(f: UncertainFunction, e: float) -> float:
    """Probability that energy value e is available."""
    if not f.domain.contains(e, ROOT_TOLERANCE):
        raise ValueError(
            f"energy {e} outside domain [{f.domain.lower}, {f.domain.upper}]"
        )
    raw = min(_poly_eval(p, e) for p in f.polys)
    return min(1.0, max(0.0, raw))


def threshold_intervals(f: UncertainFunction, p0: float) -> list[EnergyBounds]:
    """The set {e in domain : f(e) >= p0} as sorted disjoint closed intervals.

    At p0 = 0 the whole domain qualifies, since f is clamped at zero.
    """
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("probability threshold must lie in [0, 1]")
    if p0 == 0.0:
        return [f.domain]
    pieces = [(f.domain.lower, f.domain.upper)]
    for poly in f.polys:
        shifted = _shift(poly, p0)
        level = _super_level(shifted, f.domain.lower, f.domain.upper)
        pieces = _intersect(pieces, level)
        if not pieces:
            return []
    return [EnergyBounds(lo, hi) for lo, hi in pieces]


def implied_domain(polys) -> EnergyBounds | None:
    """Hull of {e : min_i p_i(e) >= 0}, the natural domain of a function
    whose message encoding carries no explicit energy range.

    Returns None when that set is unbounded (e.g. all-constant
    polynomials); raises when it is empty.
    """
    polys = tuple(tuple(float(c) for c in p) for p in polys)
    pieces = [(-math.inf, math.inf)]
    for poly in polys:
        pieces = _intersect(pieces, _super_level_real(poly))
        if not pieces:
            raise ValidationError("uncertain function is nowhere non-negative")
    lo = pieces[0][0]
    hi = pieces[-1][1]
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return None
    return EnergyBounds(lo, hi)


def _poly_eval(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _shift(coeffs, offset: float) -> tuple[float, ...]:
    return (coeffs[0] - offset,) + tuple(coeffs[1:])


def _derivative(coeffs) -> tuple[float, ...]:
    return tuple(i * c for i, c in enumerate(coeffs))[1:] or (0.0,)


def _quadratic_roots(coeffs) -> list[float]:
    c0, c1, c2 = (list(coeffs) + [0.0, 0.0])[:3]
    if c2 == 0.0:
        if c1 == 0.0:
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    return sorted({(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)})


def _bisect(coeffs, lo: float, hi: float) -> float:
    flo = _poly_eval(coeffs, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = _poly_eval(coeffs, mid)
        if hi - lo <= ROOT_TOLERANCE:
            return mid
        if (flo <= 0.0) == (fmid <= 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _roots_in(coeffs, lo: float, hi: float) -> list[float]:
    """Real roots inside [lo, hi].  Analytic up to degree 2; degree 3 is
    split into monotone pieces at the derivative's roots and bisected."""
    degree = len(coeffs) - 1
    while degree > 0 and coeffs[degree] == 0.0:
        degree -= 1
    coeffs = coeffs[: degree + 1]
    if degree == 0:
        return []
    if degree <= 2:
        return [r for r in _quadratic_roots(coeffs) if lo - 1e-12 <= r <= hi + 1e-12]
    breaks = [lo] + [
        r for r in _quadratic_roots(_derivative(coeffs)) if lo < r < hi
    ] + [hi]
    roots: list[float] = []
    for a, b in zip(breaks, breaks[1:]):
        fa, fb = _poly_eval(coeffs, a), _poly_eval(coeffs, b)
        if fa == 0.0:
            roots.append(a)
        elif (fa < 0.0) != (fb < 0.0):
            roots.append(_bisect(coeffs, a, b))
    if _poly_eval(coeffs, hi) == 0.0:
        roots.append(hi)
    return sorted(set(roots))


def _super_level(coeffs, lo: float, hi: float) -> list[tuple[float, float]]:
    """{x in [lo, hi] : p(x) >= 0} as disjoint intervals."""
    points = [lo] + _roots_in(coeffs, lo, hi) + [hi]
    intervals: list[tuple[float, float]] = []
    for a, b in zip(points, points[1:]):
        if b <= a:
            continue
        if _poly_eval(coeffs, 0.5 * (a + b)) >= 0.0:
            if intervals and math.isclose(intervals[-1][1], a, abs_tol=1e-12):
                intervals[-1] = (intervals[-1][0], b)
            else:
                intervals.append((a, b))
    return intervals


def _super_level_real(coeffs) -> list[tuple[float, float]]:
    """{x : p(x) >= 0} over the whole real line, endpoints may be infinite."""
    degree = len(coeffs) - 1
    while degree > 0 and coeffs[degree] == 0.0:
        degree -= 1
    trimmed = coeffs[: degree + 1]
    if degree == 0:
        return [(-math.inf, math.inf)] if trimmed[0] >= 0.0 else []
    # bracket all roots, then reuse the bounded-interval scan
    bound = 1.0
    for _ in range(200):
        crit = _quadratic_roots(_derivative(trimmed)) if degree == 3 else []
        if all(abs(r) < bound for r in crit) and _no_sign_change_outside(trimmed, bound):
            break
        bound *= 2.0
    inner = _super_level(trimmed, -bound, bound)
    out: list[tuple[float, float]] = []
    pos_left = _poly_eval(trimmed, -bound) >= 0.0
    pos_right = _poly_eval(trimmed, bound) >= 0.0
    for lo, hi in inner:
        a = -math.inf if (lo <= -bound + 1e-12 and pos_left) else lo
        b = math.inf if (hi >= bound - 1e-12 and pos_right) else hi
        out.append((a, b))
    return out


def _no_sign_change_outside(coeffs, bound: float) -> bool:
    lead = coeffs[-1]
    degree = len(coeffs) - 1
    right_limit = lead
    left_limit = lead if degree % 2 == 0 else -lead
    return (_poly_eval(coeffs, bound) > 0.0) == (right_limit > 0.0) and (
        _poly_eval(coeffs, -bound) > 0.0
    ) == (left_limit > 0.0)


def _intersect(
    xs: list[tuple[float, float]], ys: list[tuple[float, float]]
) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        lo = max(xs[i][0], ys[j][0])
        hi = min(xs[i][1], ys[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if xs[i][1] < ys[j][1]:
            i += 1
        else:
            j += 1
    return out
