"""Planar halfspace-intersection helpers.

A polygon is given as rows (a, b, c) meaning a*x + b*y <= c.  These
utilities answer the questions the dependency-constraint machinery
needs: extreme values of a linear functional, the vertex set, and the
admissible y interval at a fixed x.
"""

from __future__ import annotations

import math

from . import simplex
from .errors import ValidationError


def linear_range(rows, cx: float, cy: float) -> tuple[float, float]:
    """Range of cx*x + cy*y over the polygon; +-inf marks unbounded sides."""
    a = [[r[0], r[1]] for r in rows]
    b = [r[2] for r in rows]
    lo = simplex.solve([cx, cy], a, b)
    if lo.status == simplex.INFEASIBLE:
        raise ValidationError("halfspace system has no solution")
    hi = simplex.solve([-cx, -cy], a, b)
    low = -math.inf if lo.status == simplex.UNBOUNDED else lo.objective
    high = math.inf if hi.status == simplex.UNBOUNDED else -hi.objective
    return low, high


def x_range(rows) -> tuple[float, float]:
    return linear_range(rows, 1.0, 0.0)


def y_range(rows) -> tuple[float, float]:
    return linear_range(rows, 0.0, 1.0)


def y_interval_at(rows, x: float, tol: float = 1e-9) -> tuple[float, float] | None:
    """Admissible [ylo, yhi] at fixed x, or None when empty there."""
    lo, hi = -math.inf, math.inf
    for a, b, c in rows:
        rest = c - a * x
        if b > tol:
            hi = min(hi, rest / b)
        elif b < -tol:
            lo = max(lo, rest / b)
        elif rest < -tol:
            return None
    if lo > hi + tol:
        return None
    return lo, hi


def vertices(rows, tol: float = 1e-7) -> list[tuple[float, float]]:
    """Vertices of the (bounded) polygon, deduplicated, unordered."""
    pts: list[tuple[float, float]] = []
    n = len(rows)
    for i in range(n):
        a1, b1, c1 = rows[i]
        for j in range(i + 1, n):
            a2, b2, c2 = rows[j]
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-12:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if all(a * x + b * y <= c + tol for a, b, c in rows):
                if not any(abs(x - px) <= tol and abs(y - py) <= tol for px, py in pts):
                    pts.append((x, y))
    return pts
