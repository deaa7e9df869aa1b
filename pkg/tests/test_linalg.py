import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gconn.linalg import (InconsistentSystemError, Subspace,
                          central_difference, curve_derivative,
                          directional_derivative, range_space,
                          rank_nullspace, solve_consistent)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_subspace_basis_orthonormal():
    rng = np.random.default_rng(1)
    vecs = [rng.standard_normal(5) for _ in range(3)]
    S = Subspace(vecs)
    assert S.dim == 3
    assert np.allclose(S.basis.T @ S.basis, np.eye(3))


def test_subspace_dedupes_dependent_vectors():
    v = np.array([1.0, 2.0, 0.0])
    S = Subspace([v, 2 * v, -v])
    assert S.dim == 1
    assert S.contains(7 * v, 1e-12)
    assert not S.contains(np.array([0.0, 0.0, 1.0]), 1e-8)


def test_empty_subspace():
    S = Subspace([], ambient_dim=4)
    assert S.dim == 0
    assert np.allclose(S.project(np.ones(4)), 0.0)


def test_rank_nullspace_consistency():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((4, 6))
    A[3] = A[0] + A[1]  # force rank 3
    r, kern = rank_nullspace(A)
    assert r == 3
    assert kern.dim == 3
    assert np.linalg.norm(A @ kern.basis) < 1e-10


def test_range_space_matches_columns():
    A = np.array([[1.0, 2.0], [0.0, 0.0], [3.0, 6.0]])
    R = range_space(A)
    assert R.dim == 1
    assert R.contains(A[:, 1], 1e-12)


def test_solve_consistent_min_norm():
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    x = solve_consistent(A, np.array([2.0, 3.0]))
    assert np.allclose(x, [2.0, 3.0, 0.0])


def test_solve_consistent_raises_on_inconsistency():
    A = np.array([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(InconsistentSystemError) as exc:
        solve_consistent(A, np.array([1.0, 0.0]))
    assert exc.value.residual > 0.1


def test_central_difference_jacobian():
    def f(x):
        return np.array([x[0] ** 2, x[0] * x[1]])

    x = np.array([1.5, -0.7])
    J = central_difference(f, x, 1e-6)
    expect = np.array([[2 * x[0], 0.0], [x[1], x[0]]])
    assert np.linalg.norm(J - expect) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(finite, min_size=4, max_size=4),
                min_size=2, max_size=5))
def test_projection_idempotent_property(rows):
    S = Subspace([np.array(r) for r in rows], ambient_dim=4)
    v = np.arange(4.0)
    p = S.project(v)
    assert np.linalg.norm(S.project(p) - p) < 1e-8 * max(1, np.linalg.norm(p))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(finite, min_size=3, max_size=3),
                min_size=1, max_size=4))
def test_rank_plus_nullity_property(rows):
    A = np.array(rows)
    r, kern = rank_nullspace(A)
    assert r + kern.dim == A.shape[1]
    assert range_space(A).dim == r


def test_directional_and_curve_derivatives_agree():
    def f(x):
        return np.sin(x)

    x = np.array([0.2, 0.4, 0.6])
    v = np.array([1.0, -2.0, 0.5])
    d1 = directional_derivative(f, x, v, 1e-5)
    d2 = curve_derivative(lambda t: f(x + t * v), 1e-5)
    assert np.linalg.norm(d1 - d2) < 1e-12
    assert np.linalg.norm(d1 - np.cos(x) * v) < 1e-9
