"""Small dense linear-program solver.

Solves  maximize c.x  subject to rows of ``a.x <= b`` / ``a.x >= b`` and
per-variable lower bounds (default 0), via a two-phase tableau simplex with
Bland's anti-cycling rule.  Instances here are tiny (a few dozen variables,
a few hundred rows), so the implementation favors determinism and an exact
status trichotomy over speed: identical inputs produce bit-identical
outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import LpFailure, ShapeError

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximize ``objective . x``  s.t.  ``rows[i] . x (<=|>=) rhs[i]`` and
    ``x >= lower_bounds`` (componentwise)."""

    num_vars: int
    objective: np.ndarray
    rows: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray

    def __post_init__(self) -> None:
        obj = np.asarray(self.objective, dtype=np.float64)
        if obj.shape != (self.num_vars,):
            raise ShapeError(f"objective length {obj.size} != num_vars {self.num_vars}")
        rows = np.asarray(self.rows, dtype=np.float64).reshape(-1, self.num_vars) if np.size(self.rows) else np.zeros((0, self.num_vars))
        rhs = np.atleast_1d(np.asarray(self.rhs, dtype=np.float64))
        rels = tuple(self.relations)
        if rows.shape[0] != rhs.size or rows.shape[0] != len(rels):
            raise ShapeError(f"{rows.shape[0]} rows, {rhs.size} bounds, {len(rels)} relations")
        if any(r not in ("<=", ">=") for r in rels):
            raise ShapeError(f"relations must be '<=' or '>=', got {rels}")
        lb = np.asarray(self.lower_bounds, dtype=np.float64)
        if lb.shape != (self.num_vars,):
            raise ShapeError(f"lower_bounds length {lb.size} != num_vars {self.num_vars}")
        for name, arr in (("objective", obj), ("rows", rows), ("rhs", rhs), ("lower_bounds", lb)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise ShapeError(f"{name} contains non-finite entries")
        for name, arr in (("objective", obj), ("rows", rows), ("rhs", rhs), ("lower_bounds", lb)):
            arr.setflags(write=False)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower_bounds", lb)

    @property
    def num_constraints(self) -> int:
        return self.rows.shape[0]


def linear_program(
    objective: Sequence[float],
    constraints: Iterable[tuple[Sequence[float], str, float]],
    lower_bounds: Sequence[float] | None = None,
) -> LinearProgram:
    """Convenience constructor from (coefficients, relation, bound) triples."""
    obj = np.asarray(objective, dtype=np.float64)
    rows, rels, rhs = [], [], []
    for coeffs, rel, bound in constraints:
        rows.append(np.asarray(coeffs, dtype=np.float64))
        rels.append(rel)
        rhs.append(float(bound))
    lb = np.zeros(obj.size) if lower_bounds is None else np.asarray(lower_bounds, dtype=np.float64)
    return LinearProgram(
        num_vars=obj.size,
        objective=obj,
        rows=np.array(rows) if rows else np.zeros((0, obj.size)),
        relations=tuple(rels),
        rhs=np.array(rhs),
        lower_bounds=lb,
    )


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """Solver verdict: exact status plus, when optimal, the maximizing point,
    its objective value, and the indices of constraints active at it."""

    status: str
    value: float | None = None
    point: np.ndarray | None = None
    active: tuple[int, ...] = field(default_factory=tuple)


def check_point(lp: LinearProgram, point: Sequence[float], feas_tol: float = FEAS_TOL) -> tuple[bool, float]:
    """Worst constraint violation of ``point`` (0 when inside); feasible iff
    the violation is at most ``feas_tol``."""
    x = np.asarray(point, dtype=np.float64)
    if x.shape != (lp.num_vars,):
        raise ShapeError(f"point length {x.size} != num_vars {lp.num_vars}")
    worst = 0.0
    if lp.num_constraints:
        lhs = lp.rows @ x
        for i, rel in enumerate(lp.relations):
            gap = lhs[i] - lp.rhs[i] if rel == "<=" else lp.rhs[i] - lhs[i]
            worst = max(worst, gap)
    if lp.num_vars:
        worst = max(worst, float(np.max(lp.lower_bounds - x)))
    return worst <= feas_tol, worst


def _pivot(tableau: np.ndarray, cost_rows: list[np.ndarray], basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    piv = tableau[row]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * piv
    for r in cost_rows:
        if r[col] != 0.0:
            r -= r[col] * piv
    basis[row] = col


def _pivot_loop(
    tableau: np.ndarray,
    cost: np.ndarray,
    extra_cost_rows: list[np.ndarray],
    basis: np.ndarray,
    allowed_cols: int,
    pivot_tol: float,
    max_pivots: int,
) -> str:
    """Minimize ``cost`` with Bland's rule: entering = smallest eligible
    column index, leaving = minimum ratio with smallest basic index on ties."""
    m = tableau.shape[0]
    for _ in range(max_pivots):
        col = -1
        for j in range(allowed_cols):
            if cost[j] < -pivot_tol:
                col = j
                break
        if col < 0:
            return OPTIMAL
        row, best_ratio = -1, np.inf
        for i in range(m):
            aij = tableau[i, col]
            if aij > pivot_tol:
                ratio = tableau[i, -1] / aij
                if ratio < best_ratio - pivot_tol or (
                    abs(ratio - best_ratio) <= pivot_tol and (row < 0 or basis[i] < basis[row])
                ):
                    row, best_ratio = i, ratio
        if row < 0:
            return UNBOUNDED
        _pivot(tableau, [cost] + extra_cost_rows, basis, row, col)
    raise LpFailure(f"simplex did not terminate within {max_pivots} pivots")


def _reduced_cost_row(raw: np.ndarray, tableau: np.ndarray, basis: np.ndarray) -> np.ndarray:
    row = raw.copy()
    for i, b in enumerate(basis):
        if row[b] != 0.0:
            row -= row[b] * tableau[i]
    return row


def solve(lp: LinearProgram, pivot_tol: float = PIVOT_TOL, feas_tol: float = FEAS_TOL) -> LpOutcome:
    """Solve ``lp`` to the exact status trichotomy.

    Deterministic: the pivot sequence is a pure function of the input data.
    Raises LpFailure (with a basis condition diagnostic) if the final point
    fails its own feasibility check, which indicates an ill-conditioned
    instance rather than a wrong answer elsewhere.
    """
    k = lp.num_vars
    m = lp.num_constraints
    lower = lp.lower_bounds

    # canonical form: A y <= b with y = x - lower >= 0
    sign = np.array([1.0 if r == "<=" else -1.0 for r in lp.relations])
    a_can = lp.rows * sign[:, None] if m else np.zeros((0, k))
    b_can = lp.rhs * sign - a_can @ lower if m else np.zeros(0)

    neg = b_can < 0
    n_art = int(np.count_nonzero(neg))
    ncols = k + m + n_art
    tableau = np.zeros((m, ncols + 1))
    tableau[:, :k] = np.where(neg[:, None], -a_can, a_can)
    basis = np.empty(m, dtype=np.int64)
    art_cols: list[int] = []
    next_art = k + m
    for i in range(m):
        if neg[i]:
            tableau[i, k + i] = -1.0
            tableau[i, next_art] = 1.0
            basis[i] = next_art
            art_cols.append(next_art)
            next_art += 1
        else:
            tableau[i, k + i] = 1.0
            basis[i] = k + i
    tableau[:, -1] = np.where(neg, -b_can, b_can)
    columns_snapshot = tableau[:, :ncols].copy()

    max_pivots = 10_000 + 200 * (m + ncols)

    raw_phase2 = np.zeros(ncols + 1)
    raw_phase2[:k] = -lp.objective  # maximize c.y == minimize -c.y
    cost2 = _reduced_cost_row(raw_phase2, tableau, basis)

    if n_art:
        raw_phase1 = np.zeros(ncols + 1)
        raw_phase1[art_cols] = 1.0
        cost1 = _reduced_cost_row(raw_phase1, tableau, basis)
        status = _pivot_loop(tableau, cost1, [cost2], basis, ncols, pivot_tol, max_pivots)
        if status != OPTIMAL:  # phase 1 objective is bounded below by 0
            raise LpFailure("phase-1 simplex reported unbounded; input data is inconsistent")
        if -cost1[-1] > feas_tol:
            return LpOutcome(status=INFEASIBLE)
        # drive leftover artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= k + m:
                for j in range(k + m):
                    if abs(tableau[i, j]) > pivot_tol:
                        _pivot(tableau, [cost2], basis, i, j)
                        break

    status = _pivot_loop(tableau, cost2, [], basis, k + m, pivot_tol, max_pivots)
    if status == UNBOUNDED:
        return LpOutcome(status=UNBOUNDED)

    y = np.zeros(ncols)
    y[basis] = tableau[:, -1]
    x = y[:k] + lower
    feasible, worst = check_point(lp, x, feas_tol)
    if not feasible:
        cond = float(np.linalg.cond(columns_snapshot[:, basis])) if m else 1.0
        raise LpFailure(
            f"simplex solution violates constraints by {worst:.3e} (> {feas_tol}); "
            f"basis condition number {cond:.3e}"
        )
    value = float(lp.objective @ x)
    active = []
    if m:
        gaps = np.abs(lp.rows @ x - lp.rhs)
        active = [i for i in range(m) if gaps[i] <= feas_tol]
    x.setflags(write=False)
    return LpOutcome(status=OPTIMAL, value=value, point=x, active=tuple(active))
