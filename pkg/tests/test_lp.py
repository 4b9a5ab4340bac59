"""Two-phase simplex: statuses, feasibility guarantees, oracle agreement."""

import numpy as np
import pytest

from oracles import random_lp, vertex_optimum
from refdata import A2_HAT, LOWER_POSITIONS, Q16, RAISE_POSITIONS
from wavemask.errors import ConfigurationError
from wavemask.lp import Constraint, LinearProgram, Objective, max_violation, solve
from wavemask.wavelet import decompose, make_filter
from wavemask.wrm import build_wrm


def test_single_variable_maximum():
    lp = LinearProgram(
        num_vars=1,
        rows=(Constraint([1.0], "<=", 1.0), Constraint([1.0], ">=", 0.0)),
        objective=Objective([1.0], "maximize"),
    )
    sol = solve(lp, mode="optimize")
    assert sol.status == "optimal"
    assert abs(sol.x[0] - 1.0) < 1e-9
    assert abs(sol.objective_value - 1.0) < 1e-9


def test_infeasible_status():
    lp = LinearProgram(
        num_vars=1,
        rows=(Constraint([1.0], "<=", 0.0), Constraint([1.0], ">=", 1.0)),
    )
    assert solve(lp).status == "infeasible"


def test_unbounded_status():
    lp = LinearProgram(
        num_vars=1,
        rows=(Constraint([1.0], ">=", 0.0),),
        objective=Objective([1.0], "maximize"),
    )
    assert solve(lp, mode="optimize").status == "unbounded"


def test_equality_rows():
    lp = LinearProgram(
        num_vars=2,
        rows=(Constraint([1.0, 1.0], "=", 2.0), Constraint([1.0, -1.0], "=", 0.0)),
    )
    sol = solve(lp)
    assert sol.status == "feasible"
    assert np.allclose(sol.x, [1.0, 1.0], atol=1e-9)


def test_free_variables_can_go_negative():
    lp = LinearProgram(
        num_vars=2,
        rows=(Constraint([1.0, 0.0], "<=", -5.0), Constraint([0.0, 1.0], ">=", -2.0)),
        objective=Objective([1.0, -1.0], "maximize"),
        bounds=((-10.0, 10.0), (-10.0, 10.0)),
    )
    sol = solve(lp, mode="optimize")
    assert sol.status == "optimal"
    assert abs(sol.x[0] - (-5.0)) < 1e-9
    assert abs(sol.x[1] - (-2.0)) < 1e-9


def test_bounds_are_honored_in_feasibility_mode():
    lp = LinearProgram(
        num_vars=2,
        rows=(Constraint([1.0, 1.0], ">=", 3.0),),
        bounds=((0.0, 2.0), (0.0, 2.0)),
    )
    sol = solve(lp)
    assert sol.status == "feasible"
    assert max_violation(lp, sol.x) <= 1e-7


def test_degenerate_instance_terminates():
    """Classic cycling example for naive pivoting; Bland's rule must finish."""
    lp = LinearProgram(
        num_vars=4,
        rows=(
            Constraint([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
            Constraint([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            Constraint([0.0, 0.0, 1.0, 0.0], "<=", 1.0),
            Constraint([1.0, 0.0, 0.0, 0.0], ">=", 0.0),
            Constraint([0.0, 1.0, 0.0, 0.0], ">=", 0.0),
            Constraint([0.0, 0.0, 1.0, 0.0], ">=", 0.0),
            Constraint([0.0, 0.0, 0.0, 1.0], ">=", 0.0),
        ),
        objective=Objective([0.75, -150.0, 0.02, -6.0], "maximize"),
    )
    sol = solve(lp, mode="optimize")
    assert sol.status == "optimal"
    assert abs(sol.objective_value - 0.05) < 1e-9


def test_feasible_solutions_satisfy_all_rows():
    rng = np.random.default_rng(11)
    statuses = {"feasible": 0, "infeasible": 0}
    for _ in range(120):
        lp = random_lp(rng)
        sol = solve(lp)
        statuses[sol.status] += 1
        if sol.status == "feasible":
            assert max_violation(lp, sol.x) <= 1e-7
    assert statuses["feasible"] > 0 and statuses["infeasible"] > 0


def test_agrees_with_vertex_enumeration_oracle():
    rng = np.random.default_rng(23)
    optimal_cases = 0
    for _ in range(130):
        lp = random_lp(rng)
        sol = solve(lp, mode="optimize")
        status, best = vertex_optimum(lp)
        if sol.status == "optimal":
            optimal_cases += 1
            assert status == "optimal"
            assert abs(sol.objective_value - best) <= 1e-6 * max(1.0, abs(best))
            assert max_violation(lp, sol.x) <= 1e-7
        else:
            assert sol.status == "infeasible"
            assert status == "infeasible"
    assert optimal_cases >= 100


def test_determinism():
    rng = np.random.default_rng(5)
    lp = random_lp(rng)
    first = solve(lp, mode="optimize")
    second = solve(lp, mode="optimize")
    assert first.status == second.status
    if first.x is not None:
        assert np.array_equal(first.x, second.x)


def test_worked_example_system_is_feasible():
    filt = make_filter("daubechies", 2)
    wrm = build_wrm(16, 2, filt)
    a2 = decompose(Q16, filt, 2).approx
    grid = wrm.entries @ a2
    rows = []
    for i in sorted(LOWER_POSITIONS + RAISE_POSITIONS):
        relation = "<=" if i in LOWER_POSITIONS else ">="
        rows.append(Constraint(wrm.row(i), relation, grid[i - 1]))
    lp = LinearProgram(num_vars=4, rows=tuple(rows))

    sol = solve(lp)
    assert sol.status == "feasible"
    assert max_violation(lp, sol.x) <= 1e-7
    # the quoted solution satisfies the full-precision rows with modest slack
    assert max_violation(lp, A2_HAT) <= 1.0


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        Constraint([1.0, np.nan], "<=", 0.0)
    with pytest.raises(ConfigurationError):
        Constraint([1.0], "<=", np.inf)
    with pytest.raises(ConfigurationError):
        Constraint([1.0], "!!", 0.0)
    with pytest.raises(ConfigurationError):
        Objective([1.0], "biggest")
    with pytest.raises(ConfigurationError):
        LinearProgram(num_vars=2, rows=(Constraint([1.0], "<=", 0.0),))
    with pytest.raises(ConfigurationError):
        LinearProgram(num_vars=1, rows=(), bounds=((0.0, 1.0), (0.0, 1.0)))
    lp = LinearProgram(num_vars=1, rows=(Constraint([1.0], ">=", 0.0),))
    with pytest.raises(ConfigurationError):
        solve(lp, mode="fastest")
    with pytest.raises(ConfigurationError):
        solve(lp, mode="optimize")
