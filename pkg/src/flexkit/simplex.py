"""Dense two-phase simplex for small linear programs.

Solves  min c.x  subject to  A x <= b  with free variables.  Free
variables are split into positive/negative parts, slacks are added and
phase 1 drives artificials out on rows with negative right-hand sides.
Bland's rule is used throughout, so the method cannot cycle; speed is a
non-goal, the problems are tiny and dense.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class SimplexResult:
    status: str
    x: np.ndarray | None
    objective: float | None


def solve(c, a_ub, b_ub, tol: float = 1e-9) -> SimplexResult:
    """Minimize c.x over {x : a_ub @ x <= b_ub}, x unrestricted in sign."""
    c = np.asarray(c, dtype=float)
    a = np.atleast_2d(np.asarray(a_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float)
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")

    # columns: u (n), v (n), slacks (m), artificials (k)
    neg = b < 0
    k = int(neg.sum())
    ncols = 2 * n + m + k
    tab = np.zeros((m, ncols + 1))
    tab[:, :n] = a
    tab[:, n:2 * n] = -a
    tab[np.arange(m), 2 * n + np.arange(m)] = 1.0
    tab[:, -1] = b
    tab[neg] *= -1.0
    basis = list(2 * n + np.arange(m))
    art_cols = []
    for j, i in enumerate(np.flatnonzero(neg)):
        col = 2 * n + m + j
        tab[i, col] = 1.0
        basis[i] = col
        art_cols.append(col)

    if art_cols:
        # phase 1: minimize the sum of artificials
        obj = np.zeros(ncols + 1)
        for col in art_cols:
            obj[col] = 1.0
        for i, bv in enumerate(basis):
            if obj[bv] != 0.0:
                obj = obj - obj[bv] * tab[i]
        status = _iterate(tab, obj, basis, allowed=2 * n + m)
        if status != OPTIMAL or -obj[-1] > max(tol, 1e-7):
            return SimplexResult(INFEASIBLE, None, None)
        tab, basis = _drop_artificials(tab, basis, 2 * n + m)
        ncols = tab.shape[1] - 1

    obj = np.zeros(ncols + 1)
    obj[:n] = c
    obj[n:2 * n] = -c
    for i, bv in enumerate(basis):
        if obj[bv] != 0.0:
            obj = obj - obj[bv] * tab[i]
    status = _iterate(tab, obj, basis, allowed=ncols)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, None)

    values = np.zeros(ncols)
    for i, bv in enumerate(basis):
        values[bv] = tab[i, -1]
    x = values[:n] - values[n:2 * n]
    return SimplexResult(OPTIMAL, x, float(c @ x))


def _iterate(tab, obj, basis, allowed: int) -> str:
    """Run Bland-rule pivots in place until optimal or unbounded."""
    m = tab.shape[0]
    max_iter = 200 * (m + allowed) + 1000
    for _ in range(max_iter):
        entering = -1
        for j in range(allowed):
            if obj[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        ratio = np.inf
        leave = -1
        for i in range(m):
            aij = tab[i, entering]
            if aij > _PIVOT_TOL:
                r = tab[i, -1] / aij
                if r < ratio - _PIVOT_TOL or (
                    abs(r - ratio) <= _PIVOT_TOL
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    ratio = r
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(tab, obj, basis, leave, entering)
    raise RuntimeError("simplex iteration limit exceeded")


def _pivot(tab, obj, basis, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * tab[row]
    if obj[col] != 0.0:
        obj -= obj[col] * tab[row]
    basis[row] = col


def _drop_artificials(tab, basis, nreal: int):
    """Pivot artificials out of the basis, then cut their columns."""
    keep_rows = []
    for i in range(tab.shape[0]):
        if basis[i] >= nreal:
            pivot_col = -1
            for j in range(nreal):
                if abs(tab[i, j]) > _PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant row
            dummy = np.zeros(tab.shape[1])
            _pivot(tab, dummy, basis, i, pivot_col)
        keep_rows.append(i)
    tab = tab[keep_rows]
    basis = [basis[i] for i in keep_rows]
    return np.hstack([tab[:, :nreal], tab[:, -1:]]), basis
