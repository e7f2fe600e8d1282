# tests/test_lp_solver.py - Tests for the dense simplex LP solver
import sys
import os

# Add project root to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np

from replicator.lp_solver import linprog_dense


def test_optimal_inequalities():
    print("🧪 Testing an optimal LP...")

    # max x + 2y  s.t. x + y <= 4, x + 3y <= 6
    res = linprog_dense(
        c=np.array([-1.0, -2.0]),
        A_ub=np.array([[1.0, 1.0], [1.0, 3.0]]),
        b_ub=np.array([4.0, 6.0]),
    )
    assert res.status == "optimal"
    assert np.allclose(res.x, [3.0, 1.0])
    assert abs(res.fun + 5.0) < 1e-12
    print("   ✅ Optimal LP passed")


def test_equalities_and_negative_rhs():
    print("🧪 Testing equality constraints...")

    # min x1 + 2 x2 + 3 x3  s.t. sum x = 1, -x1 <= -0.25
    res = linprog_dense(
        c=np.array([1.0, 2.0, 3.0]),
        A_ub=np.array([[-1.0, 0.0, 0.0]]),
        b_ub=np.array([-0.25]),
        A_eq=np.ones((1, 3)),
        b_eq=np.ones(1),
    )
    assert res.status == "optimal"
    assert np.allclose(res.x, [1.0, 0.0, 0.0])
    assert abs(res.fun - 1.0) < 1e-12
    print("   ✅ Equality constraints passed")


def test_infeasible_and_unbounded():
    print("🧪 Testing infeasible and unbounded LPs...")

    res = linprog_dense(
        c=np.array([1.0]),
        A_ub=np.array([[1.0], [-1.0]]),
        b_ub=np.array([1.0, -2.0]),
    )
    assert res.status == "infeasible"
    assert res.x is None

    res = linprog_dense(c=np.array([-1.0, 0.0]), A_ub=np.array([[0.0, 1.0]]), b_ub=np.array([1.0]))
    assert res.status == "unbounded"
    print("   ✅ Infeasible and unbounded passed")


def test_redundant_equalities():
    print("🧪 Testing redundant equality rows...")

    res = linprog_dense(
        c=np.array([1.0, 1.0]),
        A_eq=np.array([[1.0, 1.0], [2.0, 2.0]]),
        b_eq=np.array([1.0, 2.0]),
    )
    assert res.status == "optimal"
    assert abs(res.fun - 1.0) < 1e-12
    assert abs(res.x.sum() - 1.0) < 1e-12
    print("   ✅ Redundant equalities passed")


def test_degenerate_problem_terminates():
    """A degenerate vertex must not make Bland's rule cycle."""
    print("🧪 Testing a degenerate LP...")

    c = np.array([-0.75, 150.0, -0.02, 6.0])
    A_ub = np.array([
        [0.25, -60.0, -0.04, 9.0],
        [0.5, -90.0, -0.02, 3.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    b_ub = np.array([0.0, 0.0, 1.0])
    res = linprog_dense(c, A_ub, b_ub)
    assert res.status == "optimal"
    assert abs(res.fun + 0.05) < 1e-9
    print("   ✅ Degenerate LP passed")


def run_all_tests():
    """Run all LP solver tests."""
    print("\n" + "=" * 60)
    print("🧪 LP SOLVER TESTS")
    print("=" * 60 + "\n")

    test_optimal_inequalities()
    test_equalities_and_negative_rhs()
    test_infeasible_and_unbounded()
    test_redundant_equalities()
    test_degenerate_problem_terminates()

    print("\n" + "=" * 60)
    print("🎉 ALL LP SOLVER TESTS PASSED!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    run_all_tests()
