import numpy as np
import pytest
from scipy.optimize import linprog

from vein.lp import Infeasible, Unbounded, in_convex_hull, linprog_eq, min_l1_representation


def test_matches_scipy_on_random_feasible_problems(rng):
    for _ in range(40):
        m, n = rng.integers(1, 5), rng.integers(5, 10)
        A = rng.standard_normal((m, n))
        b = A @ rng.random(n)
        c = rng.random(n) + 0.1
        ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
        res = linprog_eq(c, A, b)
        assert res.value == pytest.approx(ref.fun, abs=1e-8)
        assert np.allclose(A @ res.x, b, atol=1e-8)
        assert np.all(res.x >= -1e-12)


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        linprog_eq([1.0, 1.0], [[1.0, 1.0]], [-1.0])
    with pytest.raises(Unbounded):
        linprog_eq([-1.0, 0.0], [[1.0, -1.0]], [0.0])


def test_redundant_rows_are_tolerated():
    A = [[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]]
    res = linprog_eq([1.0, 2.0, 3.0], A, [1.0, 2.0, 1.0])
    assert res.value == pytest.approx(2.0)


def test_l1_representation():
    value, lam = min_l1_representation([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
    assert value == pytest.approx(2.0)
    assert np.allclose(lam, [1.0, 1.0])


def test_convex_hull_membership():
    square = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    assert in_convex_hull(square, [0.5, -0.9])
    assert not in_convex_hull(square, [1.01, 0.0])
