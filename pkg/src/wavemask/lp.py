"""Dense two-phase primal simplex for the small constraint systems built here.

The problems are tiny (a handful of variables, tens of rows), so the solver
favors robustness and determinism over speed: Bland's rule for anti-cycling,
free variables split into positive parts, explicit tableau arithmetic in
float64.  Infeasibility and unboundedness are reported as statuses, never
raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .wavelet import _frozen

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7

RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class Constraint:
    """One linear row: coeffs . x  <relation>  rhs."""

    coeffs: np.ndarray
    relation: str
    rhs: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        object.__setattr__(self, "rhs", float(self.rhs))
        if self.relation not in RELATIONS:
            raise ConfigurationError(f"unknown relation {self.relation!r}")
        if not np.all(np.isfinite(self.coeffs)) or not np.isfinite(self.rhs):
            raise ConfigurationError("constraint contains non-finite values")

    def violation(self, x: np.ndarray) -> float:
        """How far x is from satisfying this row (0 when satisfied)."""
        lhs = float(self.coeffs @ x)
        if self.relation == "<=":
            return max(0.0, lhs - self.rhs)
        if self.relation == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class Objective:
    coeffs: np.ndarray
    sense: str  # "maximize" or "minimize"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        if self.sense not in ("maximize", "minimize"):
            raise ConfigurationError(f"unknown objective sense {self.sense!r}")


@dataclass(frozen=True)
class LinearProgram:
    """Rows over num_vars free variables, optional objective and box bounds.

    Bounds default to unbounded on both sides; a bound of None leaves that
    side open.
    """

    num_vars: int
    rows: tuple[Constraint, ...]
    objective: Objective | None = None
    bounds: tuple[tuple[float | None, float | None], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.num_vars < 1:
            raise ConfigurationError(f"num_vars must be positive, got {self.num_vars}")
        for i, row in enumerate(self.rows):
            if row.coeffs.size != self.num_vars:
                raise ConfigurationError(
                    f"row {i}: expected {self.num_vars} coefficients, got {row.coeffs.size}"
                )
        if self.objective is not None and self.objective.coeffs.size != self.num_vars:
            raise ConfigurationError("objective length does not match num_vars")
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(self.bounds))
            if len(self.bounds) != self.num_vars:
                raise ConfigurationError("bounds length does not match num_vars")

    def all_rows(self) -> list[Constraint]:
        """Constraint rows plus bounds rewritten as rows."""
        rows = list(self.rows)
        if self.bounds is not None:
            for i, (lo, hi) in enumerate(self.bounds):
                unit = np.zeros(self.num_vars)
                unit[i] = 1.0
                if lo is not None:
                    rows.append(Constraint(unit, ">=", lo))
                if hi is not None:
                    rows.append(Constraint(unit, "<=", hi))
        return rows


@dataclass(frozen=True)
class LpSolution:
    status: str  # feasible | optimal | infeasible | unbounded
    x: np.ndarray | None = None
    objective_value: float | None = None


def max_violation(lp: LinearProgram, x) -> float:
    """Largest violation of any row or bound at point x (0 when feasible)."""
    point = np.asarray(x, dtype=np.float64)
    rows = lp.all_rows()
    if not rows:
        return 0.0
    return max(row.violation(point) for row in rows)


class _Tableau:
    """Mutable simplex tableau; bottom row holds reduced costs for maximization."""

    def __init__(self, body: np.ndarray, basis: list[int]):
        self.t = body  # (rows+1) x (cols+1), last column rhs, last row costs
        self.basis = basis

    @property
    def nrows(self) -> int:
        return self.t.shape[0] - 1

    @property
    def ncols(self) -> int:
        return self.t.shape[1] - 1

    def pivot(self, row: int, col: int) -> None:
        t = self.t
        t[row] /= t[row, col]
        for r in range(t.shape[0]):
            if r != row and abs(t[r, col]) > 0.0:
                t[r] -= t[r, col] * t[row]
        self.basis[row] = col

    def set_objective(self, costs: np.ndarray) -> None:
        # Maximize costs . x: bottom row starts at -costs, then basic
        # columns are eliminated so their reduced costs return to zero.
        self.t[-1, :] = 0.0
        self.t[-1, : self.ncols] = -costs
        for r, b in enumerate(self.basis):
            cb = costs[b]
            if cb != 0.0:
                self.t[-1] += cb * self.t[r]

    def run(self) -> str:
        """Bland's rule simplex; returns "optimal" or "unbounded"."""
        t = self.t
        for _ in range(10_000 * (self.nrows + self.ncols + 1)):
            entering = -1
            for j in range(self.ncols):
                if t[-1, j] < -PIVOT_TOL:
                    entering = j
                    break
            if entering < 0:
                return "optimal"
            leaving, best = -1, None
            for i in range(self.nrows):
                a = t[i, entering]
                if a > PIVOT_TOL:
                    ratio = max(t[i, -1], 0.0) / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving < 0:
                return "unbounded"
            self.pivot(leaving, entering)
        raise RuntimeError("simplex iteration limit exceeded")  # Bland should prevent this


def _build_phase1(rows: list[Constraint], num_vars: int):
    """Standard-form tableau with split variables, slacks and artificials."""
    nr = len(rows)
    split = 2 * num_vars
    n_slack = sum(1 for r in rows if r.relation != "=")
    n_art = nr
    ncols = split + n_slack + n_art
    t = np.zeros((nr + 1, ncols + 1))
    basis: list[int] = []
    slack_at = split
    art_at = split + n_slack
    for i, row in enumerate(rows):
        coeffs, rel, rhs = row.coeffs.copy(), row.relation, row.rhs
        if rhs < 0.0:
            coeffs, rhs = -coeffs, -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        t[i, :num_vars] = coeffs
        t[i, num_vars:split] = -coeffs
        if rel == "<=":
            t[i, slack_at] = 1.0
            slack_at += 1
        elif rel == ">=":
            t[i, slack_at] = -1.0
            slack_at += 1
        t[i, art_at + i] = 1.0
        t[i, -1] = rhs
        basis.append(art_at + i)
    return _Tableau(t, basis), split, art_at


def _drop_artificials(tab: _Tableau, art_at: int) -> _Tableau:
    """Pivot basic artificials out (or drop their redundant rows), then cut columns."""
    keep_rows = []
    for i in range(tab.nrows):
        if tab.basis[i] < art_at:
            keep_rows.append(i)
            continue
        # a basic artificial sits within FEAS_TOL of zero here; snap it to
        # exactly zero so a small pivot element cannot inflate the residue
        tab.t[i, -1] = 0.0
        pivot_col = -1
        for j in range(art_at):
            if abs(tab.t[i, j]) > PIVOT_TOL:
                pivot_col = j
                break
        if pivot_col >= 0:
            tab.pivot(i, pivot_col)
            keep_rows.append(i)
        # else: row is redundant (all-zero over real columns) and is dropped
    body = tab.t[np.array(keep_rows + [tab.nrows], dtype=int)][:, list(range(art_at)) + [-1]]
    basis = [tab.basis[i] for i in keep_rows]
    return _Tableau(np.ascontiguousarray(body), basis)


def _extract(tab: _Tableau, num_vars: int) -> np.ndarray:
    full = np.zeros(tab.ncols)
    for i, b in enumerate(tab.basis):
        full[b] = tab.t[i, -1]
    return full[:num_vars] - full[num_vars : 2 * num_vars]


def solve(lp: LinearProgram, mode: str = "feasibility") -> LpSolution:
    """Solve the program; feasibility mode stops at the first basic feasible point.

    Deterministic: identical inputs produce identical solutions.
    """
    if mode not in ("feasibility", "optimize"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    if mode == "optimize" and lp.objective is None:
        raise ConfigurationError("optimize mode requires an objective")

    rows = lp.all_rows()
    tab, split, art_at = _build_phase1(rows, lp.num_vars)

    phase1_cost = np.zeros(tab.ncols)
    phase1_cost[art_at:] = -1.0
    tab.set_objective(phase1_cost)
    tab.run()
    if tab.t[-1, -1] < -FEAS_TOL:
        return LpSolution(status="infeasible")
    tab = _drop_artificials(tab, art_at)

    if mode == "feasibility":
        return LpSolution(status="feasible", x=_extract(tab, lp.num_vars))

    sense = lp.objective.sense
    costs = np.zeros(tab.ncols)
    sign = 1.0 if sense == "maximize" else -1.0
    costs[: lp.num_vars] = sign * lp.objective.coeffs
    costs[lp.num_vars : split] = -sign * lp.objective.coeffs
    tab.set_objective(costs)
    status = tab.run()
    if status == "unbounded":
        return LpSolution(status="unbounded")
    x = _extract(tab, lp.num_vars)
    return LpSolution(status="optimal", x=x, objective_value=float(lp.objective.coeffs @ x))
