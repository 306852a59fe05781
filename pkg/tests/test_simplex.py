import numpy as np
import pytest

from coflow_sched import simplex
from coflow_sched.errors import SolverError


def test_basic_inequality_problem():
    # max x+y s.t. x+2y<=4, 3x+y<=6  ->  min -(x+y), optimum at (8/5, 6/5).
    res = simplex.solve(
        c=np.array([-1.0, -1.0]),
        a_eq=None, b_eq=None,
        a_ub=np.array([[1.0, 2.0], [3.0, 1.0]]),
        b_ub=np.array([4.0, 6.0]),
    )
    assert res.objective == pytest.approx(-2.8)
    assert res.x == pytest.approx([1.6, 1.2])


def test_equality_constraints():
    # min x + 2y s.t. x + y == 3, x <= 2.
    res = simplex.solve(
        c=np.array([1.0, 2.0]),
        a_eq=np.array([[1.0, 1.0]]),
        b_eq=np.array([3.0]),
        a_ub=np.array([[1.0, 0.0]]),
        b_ub=np.array([2.0]),
    )
    assert res.objective == pytest.approx(4.0)
    assert res.x == pytest.approx([2.0, 1.0])


def test_infeasible_detected():
    # x >= 0 with x <= -1.
    with pytest.raises(SolverError, match="infeasible"):
        simplex.solve(
            c=np.array([1.0]),
            a_eq=None, b_eq=None,
            a_ub=np.array([[1.0]]),
            b_ub=np.array([-1.0]),
        )


def test_unbounded_detected():
    with pytest.raises(SolverError, match="unbounded"):
        simplex.solve(
            c=np.array([-1.0]),
            a_eq=None, b_eq=None,
            a_ub=np.array([[-1.0]]),
            b_ub=np.array([0.0]),
        )


def test_degenerate_problem_terminates():
    # Classic cycling-prone data; Bland's rule must terminate.
    a_ub = np.array([
        [0.25, -8.0, -1.0, 9.0],
        [0.5, -12.0, -0.5, 3.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    b_ub = np.array([0.0, 0.0, 1.0])
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    res = simplex.solve(c, None, None, a_ub, b_ub)
    assert res.objective == pytest.approx(-0.05)


def test_duals_match_objective():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n, m_eq, m_ub = 6, 2, 4
        a_eq = rng.normal(size=(m_eq, n))
        a_ub = rng.normal(size=(m_ub, n))
        x_feas = rng.uniform(0.5, 1.5, size=n)
        b_eq = a_eq @ x_feas
        b_ub = a_ub @ x_feas + rng.uniform(0.1, 1.0, size=m_ub)
        c = rng.uniform(0.1, 1.0, size=n)  # bounded below on x >= 0
        res = simplex.solve(c, a_eq, b_eq, a_ub, b_ub)
        dual_obj = float(b_eq @ res.duals_eq + b_ub @ res.duals_ub)
        assert dual_obj == pytest.approx(res.objective, abs=1e-6)


def test_matches_scipy_on_random_lps():
    from scipy.optimize import linprog

    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(3, 8))
        m_ub = int(rng.integers(2, 6))
        a_ub = rng.normal(size=(m_ub, n))
        x_feas = rng.uniform(0.0, 2.0, size=n)
        b_ub = a_ub @ x_feas + rng.uniform(0.0, 1.0, size=m_ub)
        c = rng.uniform(0.05, 1.0, size=n)
        ours = simplex.solve(c, None, None, a_ub, b_ub)
        ref = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
        assert ref.status == 0
        assert ours.objective == pytest.approx(ref.fun, abs=1e-7)
