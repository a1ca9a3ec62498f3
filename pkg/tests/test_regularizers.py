import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastadjoint.linop import dot_test
from fastadjoint.regularizers import (HuberSpec, diff, diff_op, huber_grad, huber_value,
                                      soft_threshold, tv_soft_grad, tv_soft_value)

from oracles import central_fd

vectors = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=12).map(np.array)


def test_soft_threshold_examples():
    np.testing.assert_array_equal(soft_threshold([3, -0.5, 0], 1), [2, 0, 0])
    v = np.array([1.5, -2.0, 0.3])
    np.testing.assert_array_equal(soft_threshold(v, 0), v)
    with pytest.raises(ValueError):
        soft_threshold(v, -1)


@pytest.mark.parametrize("seed", range(5))
def test_soft_threshold_is_prox(seed):
    rng = np.random.default_rng(seed)
    v, tau = rng.standard_normal(6) * 2, rng.random()
    out = soft_threshold(v, tau)
    grid = np.linspace(-6, 6, 120001)
    for vi, oi in zip(v, out):
        best = grid[np.argmin(0.5 * (grid - vi) ** 2 + tau * np.abs(grid))]
        assert abs(best - oi) <= 1e-4


@settings(max_examples=50, deadline=None)
@given(vectors, st.floats(0, 5))
def test_soft_threshold_nonexpansive(a, tau):
    b = a[::-1] * 0.7
    assert (np.linalg.norm(soft_threshold(a, tau) - soft_threshold(b, tau))
            <= np.linalg.norm(a - b) + 1e-12)


def test_huber_examples():
    spec = HuberSpec(0.1)
    assert huber_value([0.0], spec) == 0 and huber_grad([0.0], spec)[0] == 0
    assert huber_value([0.05], spec) == pytest.approx(0.00125, abs=1e-15)
    np.testing.assert_array_equal(huber_grad([0.05], spec), [0.05])
    assert huber_value([1.0], spec) == pytest.approx(0.095, abs=1e-15)
    np.testing.assert_array_equal(huber_grad([1.0], spec), [0.1])
    with pytest.raises(ValueError):
        HuberSpec(0.0)


@settings(max_examples=50, deadline=None)
@given(vectors, st.floats(0.01, 3))
def test_huber_convex(a, delta):
    b = np.roll(a, 1) - 0.3
    mid = huber_value((a + b) / 2, delta)
    assert mid <= 0.5 * (huber_value(a, delta) + huber_value(b, delta)) + 1e-12


def test_diff_examples():
    np.testing.assert_array_equal(diff([1, 2, 4]), [1, 2])
    np.testing.assert_array_equal(diff(np.full(5, 3.0)), np.zeros(4))
    assert dot_test(diff_op(17), 20) <= 1e-14
    with pytest.raises(ValueError):
        diff_op(1)


def test_tv_constant_is_flat():
    h = np.full(7, 2.0)
    assert tv_soft_value(h, 0.1) == 0
    np.testing.assert_array_equal(tv_soft_grad(h, 0.1), np.zeros(7))


@pytest.mark.parametrize("seed", range(50))
def test_tv_grad_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(20)
    spec = HuberSpec(0.1)
    g = tv_soft_grad(h, spec)
    fd = central_fd(lambda x: tv_soft_value(x, spec), h)
    assert np.linalg.norm(g - fd) <= 1e-6 * np.linalg.norm(fd)


def test_tv_approaches_l1_of_differences():
    h = np.array([0.0, 1.0, -1.0, 2.0, 2.5])
    for delta in (0.1, 0.01, 0.001):
        l1 = np.abs(diff(h)).sum()
        assert abs(tv_soft_value(h, delta) - l1) <= (h.size - 1) * delta / 2 + 1e-12
