import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import bareiss_det
from homcirc.linalg import SimplexLP, det, linprog_exact, mat_vec, minor, rank, solve_linear

small = st.integers(-4, 4)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_bareiss(M):
    assert det(M) == bareiss_det(M)


def test_det_examples():
    assert det([]) == 1
    assert det([[2]]) == 2
    assert det([[0, 1], [1, 0]]) == -1
    with pytest.raises(ValueError):
        det([[1, 2]])
    assert minor([[1, 2], [3, 4]], 0, 1) == [[3]]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_solve_linear(m, n, seed):
    rng = random.Random(seed)
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    if rng.random() < 0.5:
        x0 = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
        b = mat_vec(A, x0)
    else:
        b = [rng.randint(-5, 5) for _ in range(m)]
    sol = solve_linear(A, b, n)
    consistent = np.linalg.matrix_rank(np.array(A, dtype=float)) == np.linalg.matrix_rank(
        np.column_stack([np.array(A, dtype=float), np.array([float(v) for v in b])])
    )
    assert (sol is not None) == consistent
    if sol is None:
        return
    assert mat_vec(A, sol.particular) == list(map(Fraction, b))
    assert len(sol.kernel) == n - rank(A)
    for k in sol.kernel:
        assert not any(mat_vec(A, k))


def test_solve_linear_zero_columns():
    sol = solve_linear([[0, 0]], [0], 2)
    assert len(sol.kernel) == 2
    assert solve_linear([[0, 0]], [1], 2) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_simplex_matches_scipy(seed):
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = random.Random(seed)
    m, n = rng.randint(1, 4), rng.randint(2, 6)
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(-4, 6) for _ in range(m)]
    c = [rng.randint(-2, 5) for _ in range(n)]
    res = linprog_exact(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert res.status == expected
    if expected == "optimal":
        assert abs(float(res.value) - ref.fun) < 1e-7
        assert mat_vec(A, res.x) == list(map(Fraction, b))
        assert all(v >= 0 for v in res.x)


def test_simplex_warm_start_and_degenerate_rows():
    # duplicate row is redundant; x1 + x2 = 1
    lp = SimplexLP([[1, 1], [1, 1], [2, 2]], [1, 1, 2])
    assert lp.feasible
    assert lp.minimize([1, 2]).value == 1
    assert lp.minimize([2, 1]).value == 1
    assert lp.minimize([-1, 0]).value == -1
    assert not SimplexLP([[1, 1]], [-1]).feasible
    assert linprog_exact([1], [], []).value == 0
    assert linprog_exact([-1], [], []).status == "unbounded"
