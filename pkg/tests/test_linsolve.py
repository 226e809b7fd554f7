import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from esccnn.linsolve import solve_lsq


def pinv_oracle(A, Y):
    """Minimum-norm solution through an explicitly assembled pseudoinverse."""
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cut = np.finfo(float).eps * max(A.shape) * s[0]
    s_inv = np.array([1.0 / v if v > cut else 0.0 for v in s])
    return (Vt.T * s_inv) @ U.T @ Y


def normal_eq_oracle(A, Y):
    return np.linalg.solve(A.T @ A, A.T @ Y)


def test_exact_span():
    sol = solve_lsq([[1.0], [2.0]], [[1.0], [2.0]])
    assert sol.coefficients[0, 0] == pytest.approx(1.0, abs=1e-14)
    assert sol.residual_sse[0] == pytest.approx(0.0, abs=1e-28)
    assert sol.rank == 1


def test_two_by_two():
    sol = solve_lsq([[1.0, 0.0], [1.0, 1.0]], [[3.0], [5.0]])
    np.testing.assert_allclose(sol.coefficients[:, 0], [3.0, 2.0], atol=1e-13)
    assert sol.residual_sse[0] < 1e-25


def test_duplicated_columns_minimum_norm():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(20, 3))
    A = np.column_stack([A, A[:, 1]])
    Y = rng.normal(size=(20, 2))
    sol = solve_lsq(A, Y)
    assert sol.rank == 3
    np.testing.assert_allclose(sol.coefficients, pinv_oracle(A, Y), atol=1e-8)
    # duplicated columns share the weight equally under the minimum norm
    np.testing.assert_allclose(sol.coefficients[1], sol.coefficients[3], atol=1e-10)


def test_rejects_nonfinite_and_shape():
    with pytest.raises(ValueError):
        solve_lsq([[np.nan]], [[1.0]])
    with pytest.raises(ValueError):
        solve_lsq(np.ones((3, 2)), np.ones((4, 1)))


def _instance(seed, cond_limit=None):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 12))
    P = int(rng.integers(1, 8))
    H = int(rng.integers(1, 4))
    A = rng.normal(size=(N, P))
    if rng.random() < 0.3 and P > 1:
        A[:, -1] = A[:, 0] * rng.normal()
    return A, rng.normal(size=(N, H))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**31))
def test_feasibility_dominance(seed):
    A, Y = _instance(seed)
    sol = solve_lsq(A, Y)
    assert np.all(sol.residual_sse >= 0)
    assert np.all(sol.residual_sse <= np.sum(Y * Y, axis=0) * (1 + 1e-12) + 1e-12)
    np.testing.assert_array_equal(sol.residual, Y - A @ sol.coefficients)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31))
def test_first_order_optimality(seed):
    A, Y = _instance(seed)
    sol = solve_lsq(A, Y)
    rng = np.random.default_rng(seed + 1)
    for _ in range(20):
        D = rng.normal(size=sol.coefficients.shape) * 1e-3
        R = Y - A @ (sol.coefficients + D)
        assert np.sum(R * R) >= np.sum(sol.residual_sse) - 1e-10


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31))
def test_agrees_with_normal_equations_when_well_conditioned(seed):
    rng = np.random.default_rng(seed)
    N, P = int(rng.integers(4, 30)), int(rng.integers(1, 4))
    A = rng.normal(size=(N, P))
    if np.linalg.cond(A) >= 1e6 or N < P:
        return
    Y = rng.normal(size=(N, 2))
    np.testing.assert_allclose(solve_lsq(A, Y).coefficients, normal_eq_oracle(A, Y), atol=1e-8)


def test_vector_target():
    sol = solve_lsq(np.eye(3), np.array([1.0, 2.0, 3.0]))
    assert sol.coefficients.shape == (3,)
    np.testing.assert_allclose(sol.coefficients, [1, 2, 3])
