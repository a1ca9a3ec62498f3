import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastadjoint.extend import ExtensionKind, ExtensionSpec, extension_operator
from fastadjoint.linop import (LinearOperator, compose, dense_pinv, dot_test, identity,
                               matrix_operator, to_dense)
from fastadjoint.dwt import synthesis_operator

from oracles import adjoint_gap


def rand_op(rng, m, n):
    return matrix_operator(rng.standard_normal((m, n)))


def test_compose_identity():
    op = compose(identity(4), identity(4))
    np.testing.assert_array_equal(op(np.array([1.0, 2, 3, 4])), [1, 2, 3, 4])


def test_compose_adjoint_matches_dense_product():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
    y = rng.standard_normal(8)
    op = compose(matrix_operator(a), matrix_operator(b))
    np.testing.assert_allclose(op.adjoint(y), (a @ b).T @ y, atol=1e-12)


def test_compose_checks_dimensions():
    with pytest.raises(ValueError, match="3.*4|4.*3"):
        compose(identity(3), identity(4))


def test_compose_is_associative():
    rng = np.random.default_rng(1)
    a, b, c = rand_op(rng, 5, 6), rand_op(rng, 6, 7), rand_op(rng, 7, 4)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(compose(compose(a, b), c)(x), compose(a, compose(b, c))(x),
                               atol=1e-12)


def test_pinv_of_extension_is_left_inverse():
    spec = ExtensionSpec(ExtensionKind.SYM, 2)
    e = to_dense(extension_operator(spec, 5))
    y = np.array([1.0, 2, 3, 4, 5])
    np.testing.assert_allclose(dense_pinv(e) @ (e @ y), y, atol=1e-14)
    # E E^+ is a projection, not the identity
    assert np.abs(e @ dense_pinv(e) - np.eye(9)).max() > 0.4


def test_to_dense_identity_and_zpd_block():
    np.testing.assert_array_equal(to_dense(identity(3)), np.eye(3))
    e = to_dense(extension_operator(ExtensionSpec(ExtensionKind.ZPD, 2), 3))
    expected = np.vstack([np.zeros((2, 3)), np.eye(3), np.zeros((2, 3))])
    np.testing.assert_array_equal(e, expected)


@pytest.mark.parametrize("seed", range(20))
def test_to_dense_transpose_is_adjoint(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 9, size=2)
    op = rand_op(rng, m, n)
    y = rng.standard_normal(m)
    assert np.abs(to_dense(op).T @ y - op.adjoint(y)).max() <= 1e-12


def test_dense_pinv_identity_and_displayed_sym_matrix():
    np.testing.assert_allclose(dense_pinv(np.eye(3)), np.eye(3), atol=1e-15)
    e = to_dense(extension_operator(ExtensionSpec(ExtensionKind.SYM, 2), 5))
    pinv_t = dense_pinv(e).T
    # (E_sym^+)^T: duplicated copies carry 1/2, interior rows are unit vectors
    expected = np.zeros((9, 5))
    expected[0, 1] = expected[1, 0] = expected[2, 0] = expected[3, 1] = 0.5
    expected[4, 2] = 1
    expected[5, 3] = expected[6, 4] = expected[7, 4] = expected[8, 3] = 0.5
    np.testing.assert_allclose(pinv_t, expected, atol=1e-14)


def test_dense_pinv_matches_svd_pinv():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((9, 4))
    np.testing.assert_allclose(dense_pinv(m), np.linalg.pinv(m), atol=1e-12)


def test_dense_pinv_rejects_rank_deficient():
    with pytest.raises(np.linalg.LinAlgError):
        dense_pinv(np.ones((4, 2)))


def test_dot_test_identity_is_exact():
    assert dot_test(identity(16), 10, rng_seed=1) == 0.0


def test_dot_test_true_wavelet_adjoint():
    assert dot_test(synthesis_operator("haar", "sym", 2, 32), 10) <= 1e-12


def test_dot_test_detects_pinv_approximation():
    op = synthesis_operator("haar", "sym", 2, 32, adjoint_mode="pinv_approx")
    assert dot_test(op, 10) > 1e-3


def test_dot_test_detects_broken_adjoint():
    a = np.arange(6.0).reshape(2, 3)
    bad = LinearOperator(3, 2, lambda x: a @ x, lambda y: 2 * a.T @ y)
    assert dot_test(bad) > 0.5


def test_operator_is_immutable():
    op = identity(3)
    with pytest.raises(AttributeError):
        op.in_dim = 4


def test_shape_validation():
    with pytest.raises(ValueError):
        identity(3).forward(np.ones(4))
    with pytest.raises(ValueError):
        identity(3).adjoint(np.ones(2))


def test_algebra_of_operators():
    rng = np.random.default_rng(4)
    a, b = rng.standard_normal((3, 5)), rng.standard_normal((3, 5))
    op = 2.0 * matrix_operator(a) - matrix_operator(b)
    np.testing.assert_allclose(to_dense(op), 2 * a - b, atol=1e-14)
    np.testing.assert_allclose(to_dense(op.T), (2 * a - b).T, atol=1e-14)
    assert adjoint_gap(op) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.floats(-3, 3), st.floats(-3, 3),
       st.integers(0, 2 ** 32 - 1))
def test_linearity(m, n, alpha, beta, seed):
    rng = np.random.default_rng(seed)
    op = rand_op(rng, m, n)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    lhs = op(alpha * x + beta * y)
    rhs = alpha * op(x) + beta * op(y)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))
