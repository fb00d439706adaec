"""Dense linear programming by a two-phase primal simplex.

Problems are stated as: maximize c.x subject to G x <= h, x sign-free.
Internally each free variable is split into a difference of two nonnegative
variables and one slack is appended per constraint; phase 1 (artificial
variables) runs only when some h_i < 0.  Bland's anti-cycling rule picks the
entering and leaving variables, so the iteration count is finite; a hard
budget of ``50 * (variables + constraints)`` pivots guards against numerical
stalls and raises :class:`SimplexBudgetError` when exceeded.

Rows of [G | h] and the objective are equilibrated (scaled by their largest
absolute coefficient) before the tableau is built.  That is exactly
invertible, leaves the feasible set untouched, and keeps the tableau
well-conditioned when constraint rows span many orders of magnitude; the
reported value is recomputed from the caller's own data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector

__all__ = [
    "OPTIMAL",
    "UNBOUNDED",
    "INFEASIBLE",
    "LpProblem",
    "LpOutcome",
    "SimplexBudgetError",
    "solve",
]

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-7


class SimplexBudgetError(RuntimeError):
    """Pivot budget exhausted before the simplex finished."""


@dataclass(frozen=True)
class LpProblem:
    """maximize objective . x  subject to  g x <= h  (x sign-free)."""

    objective: np.ndarray
    g: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "objective", as_vector(self.objective, "objective"))
        object.__setattr__(self, "g", as_matrix(self.g, "constraint matrix"))
        object.__setattr__(self, "h", as_vector(self.h, "constraint bounds"))
        if self.g.shape[1] != self.objective.shape[0]:
            raise ValueError(
                f"constraint matrix has {self.g.shape[1]} columns, "
                f"objective has {self.objective.shape[0]}"
            )
        if self.g.shape[0] != self.h.shape[0]:
            raise ValueError(
                f"constraint matrix has {self.g.shape[0]} rows, "
                f"bounds vector has {self.h.shape[0]}"
            )


@dataclass(frozen=True)
class LpOutcome:
    """Result of :func:`solve`; point/value are set only when optimal."""

    status: str
    point: np.ndarray | None = None
    value: float | None = None


def _pivot(tab: np.ndarray, rhs: np.ndarray, row: int, col: int) -> None:
    piv = tab[row, col]
    tab[row] /= piv
    rhs[row] /= piv
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    rhs -= factors * rhs[row]


def _iterate(
    tab: np.ndarray,
    rhs: np.ndarray,
    obj: np.ndarray,
    basis: list[int],
    budget: int,
    used: int,
) -> tuple[str, int]:
    """Run primal simplex sweeps on (tab, rhs) in place until optimal or
    unbounded.  Bland's rule: the entering column is the lowest-index one with
    positive reduced cost, the leaving row breaks ratio ties by lowest basis
    index."""
    nrows, ncols = tab.shape
    while True:
        reduced = obj - obj[basis] @ tab
        reduced[basis] = 0.0
        entering = -1
        for j in range(ncols):
            if reduced[j] > PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, used
        col = tab[:, entering]
        positive = col > PIVOT_TOL
        if not positive.any():
            return UNBOUNDED, used
        ratios = np.where(positive, np.maximum(rhs, 0.0) / np.where(positive, col, 1.0), np.inf)
        best = float(np.min(ratios))
        leaving = -1
        for i in range(nrows):
            if ratios[i] <= best + 1e-12 * (1.0 + best) and (
                leaving < 0 or basis[i] < basis[leaving]
            ):
                leaving = i
        if used >= budget:
            raise SimplexBudgetError(
                f"pivot budget of {budget} exhausted ({nrows} constraints)"
            )
        used += 1
        _pivot(tab, rhs, leaving, entering)
        basis[leaving] = entering


def solve(problem: LpProblem, iteration_budget: int | None = None) -> LpOutcome:
    """Solve an :class:`LpProblem`.

    Returns an :class:`LpOutcome` with status ``optimal`` (point and value
    set), ``unbounded``, or ``infeasible``.  ``iteration_budget`` overrides
    the default pivot budget of ``50 * (variables + constraints)``.
    """
    c = problem.objective
    n = c.shape[0]
    r = problem.g.shape[0]
    budget = 50 * (n + r) if iteration_budget is None else int(iteration_budget)

    # row equilibration of [G | h] and objective scaling (exactly invertible)
    row_scale = np.max(np.abs(problem.g), axis=1)
    row_scale[row_scale == 0.0] = 1.0
    g = problem.g / row_scale[:, None]
    h = problem.h / row_scale
    obj_scale = float(np.max(np.abs(c)))
    if obj_scale == 0.0:
        obj_scale = 1.0
    c_s = c / obj_scale

    # split free variables, append slacks
    ncols = 2 * n + r
    tab = np.hstack([g, -g, np.eye(r)])
    rhs = h.copy()
    obj = np.concatenate([c_s, -c_s, np.zeros(r)])
    basis = [2 * n + i for i in range(r)]
    used = 0

    negative = rhs < 0
    if negative.any():
        # phase 1: flip negative rows, add one artificial per flipped row
        tab[negative] *= -1.0
        rhs[negative] *= -1.0
        art_rows = np.where(negative)[0]
        art = np.zeros((r, len(art_rows)))
        for idx, i in enumerate(art_rows):
            art[i, idx] = 1.0
            basis[i] = ncols + idx
        tab1 = np.hstack([tab, art])
        obj1 = np.zeros(ncols + len(art_rows))
        obj1[ncols:] = -1.0
        status, used = _iterate(tab1, rhs, obj1, basis, budget, used)
        if status != OPTIMAL:
            raise SimplexBudgetError("phase 1 reported an unbounded objective")
        infeasibility = -float(obj1[basis] @ rhs)
        if infeasibility > FEAS_TOL:
            return LpOutcome(INFEASIBLE)
        # drive leftover artificials out of the basis; a row that cannot be
        # pivoted is redundant and is dropped
        keep = np.ones(r, dtype=bool)
        for i in range(r):
            if basis[i] < ncols:
                continue
            row = tab1[i, :ncols]
            pivots = np.where(np.abs(row) > PIVOT_TOL)[0]
            if pivots.size:
                used += 1
                _pivot(tab1, rhs, i, int(pivots[0]))
                basis[i] = int(pivots[0])
            else:
                keep[i] = False
        tab = tab1[keep, :ncols]
        rhs = rhs[keep]
        basis = [b for i, b in enumerate(basis) if keep[i]]

    status, used = _iterate(tab, rhs, obj, basis, budget, used)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)
    x_split = np.zeros(ncols)
    x_split[basis] = rhs
    x = x_split[:n] - x_split[n : 2 * n]
    x.setflags(write=False)
    return LpOutcome(OPTIMAL, point=x, value=float(c @ x))
