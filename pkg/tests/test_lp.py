import io
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from cbdmeasures.errors import DimensionMismatch
from cbdmeasures.lp import LpProblem, feasible, solve

MODES = ("float", "rational")


@pytest.mark.parametrize("mode", MODES)
def test_textbook_cases(mode):
    sol = solve(LpProblem([1], A_le=[[1]], b_le=[1], sense="max"), mode)
    assert sol.optimal and sol.value == 1
    assert solve(LpProblem([1], A_le=[[1]], b_le=[-1]), mode).status == "infeasible"
    sol = solve(LpProblem([1, 1], A_le=[[-1, -1]], b_le=[-2]), mode)
    assert sol.optimal and sol.value == 2
    assert solve(LpProblem([1], sense="max"), mode).status == "unbounded"


@pytest.mark.parametrize("mode", MODES)
def test_feasibility(mode):
    assert feasible(LpProblem([0, 0, 0], A_eq=[[1, 1, 1]], b_eq=[1]), mode)
    assert not feasible(LpProblem([0, 0], A_eq=[[1, 1], [1, 1]], b_eq=[1, 2]), mode)
    assert feasible(LpProblem([0, 0]), mode)


def test_rational_values_are_exact():
    sol = solve(LpProblem([1, 1], A_eq=[[3, 0], [0, 7]], b_eq=[1, 2], sense="max"), "rational")
    assert sol.value == F(1, 3) + F(2, 7)
    assert all(isinstance(v, F) for v in sol.x)


def test_bounds_and_free_variables():
    # min x subject to x >= -3 (free below, bounded by a lower bound of -3)
    sol = solve(LpProblem([1], lower=[-3]), "rational")
    assert sol.value == -3
    sol = solve(LpProblem([1, 0], A_eq=[[1, -1]], b_eq=[F(-5, 2)], lower=[None, 0],
                          upper=[None, 4]), "rational")
    assert sol.value == F(-5, 2) and sol.x[1] == 0
    sol = solve(LpProblem([-1, -1], upper=[2, F(1, 2)]), "rational")
    assert sol.value == F(-5, 2)


def test_all_variables_fixed():
    sol = solve(LpProblem([1, 2], lower=[1, 1], upper=[1, 1]), "rational")
    assert sol.optimal and sol.value == 3


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        LpProblem([1, 2], A_eq=[[1, 2, 3]], b_eq=[1])
    with pytest.raises(DimensionMismatch):
        LpProblem([1, 2], A_le=[[1, 2]], b_le=[1, 2])
    with pytest.raises(ValueError):
        LpProblem([float("nan")])


def test_determinism_and_trace():
    rng = np.random.default_rng(7)
    A = rng.integers(0, 2, (6, 12))
    b = A @ rng.integers(0, 3, 12)
    prob = LpProblem(rng.integers(-3, 4, 12), A_eq=A, b_eq=b, upper=[5] * 12)
    first, second = solve(prob, "rational"), solve(prob, "rational")
    assert first.x == second.x and first.pivots == second.pivots
    buf = io.StringIO()
    solve(prob, "rational", trace=buf)
    text = buf.getvalue()
    assert "phase 1" in text and "pivot 1:" in text


def _random_problem(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 5), rng.integers(2, 7)
    A_eq = rng.integers(-2, 3, (m, n))
    x0 = rng.integers(0, 3, n)
    b_eq = A_eq @ x0 if rng.random() < 0.8 else rng.integers(-3, 4, m)
    k = rng.integers(0, 3)
    A_le = rng.integers(-2, 3, (k, n))
    b_le = A_le @ x0 + rng.integers(0, 2, k)
    upper = [int(u) if rng.random() < 0.5 else None for u in rng.integers(2, 6, n)]
    c = rng.integers(-3, 4, n)
    return c, A_eq, b_eq, A_le, b_le, upper


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_against_highs(seed):
    c, A_eq, b_eq, A_le, b_le, upper = _random_problem(seed)
    prob = LpProblem(c, A_eq=A_eq, b_eq=b_eq, A_le=A_le, b_le=b_le, upper=upper)
    ref = linprog(c, A_ub=A_le if len(A_le) else None, b_ub=b_le if len(A_le) else None,
                  A_eq=A_eq, b_eq=b_eq, bounds=[(0, u) for u in upper], method="highs")
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    exact = solve(prob, "rational")
    approx = solve(prob, "float")
    assert exact.status == expected
    assert approx.status == expected
    if expected == "optimal":
        assert abs(float(exact.value) - ref.fun) <= 1e-7
        assert abs(approx.value - float(exact.value)) <= 1e-7
        x = exact.x
        assert all(v >= 0 for v in x)
        assert all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(A_eq.tolist(), b_eq))
        assert all(sum(a * v for a, v in zip(row, x)) <= bi for row, bi in zip(A_le.tolist(), b_le))
        assert approx.certified


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weak_duality_spot_check(seed):
    c, A_eq, b_eq, A_le, b_le, upper = _random_problem(seed)
    prob = LpProblem(c, A_eq=A_eq, b_eq=b_eq, A_le=A_le, b_le=b_le, upper=upper, sense="max")
    sol = solve(prob, "rational")
    if sol.optimal:
        assert sol.first_feasible_value <= sol.value
