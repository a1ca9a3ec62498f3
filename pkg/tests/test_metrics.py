import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastadjoint.dwt import analyze2d
from fastadjoint.metrics import SsimParams, nnz_fraction, rel_err, ssim, ssim_map
from fastadjoint.problems import synthetic_chart
from fastadjoint.regularizers import soft_threshold


def test_rel_err_examples():
    ref = np.random.default_rng(0).standard_normal((16, 16))
    assert rel_err(ref, ref) == 0
    assert rel_err(1.01 * ref, ref) == pytest.approx(0.01, rel=1e-12)
    est = np.random.default_rng(1).standard_normal((16, 16))
    expected = np.sqrt(((est - ref) ** 2).sum() / (ref ** 2).sum())
    assert rel_err(est, ref) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ValueError):
        rel_err(ref, np.zeros_like(ref))
    with pytest.raises(ValueError):
        rel_err(ref, ref[:3])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100))
def test_rel_err_is_homogeneous_in_error(scale):
    rng = np.random.default_rng(2)
    ref, e = rng.standard_normal(20), rng.standard_normal(20)
    assert rel_err(ref + scale * e, ref) == pytest.approx(scale * rel_err(ref + e, ref),
                                                          rel=1e-10)


def test_nnz_fraction_examples():
    c = analyze2d(np.random.default_rng(3).standard_normal((16, 16)), "haar", 2, "sym")
    assert nnz_fraction(c.map(np.zeros_like)) == 0
    dense = c.map(lambda a: np.random.default_rng(5).standard_normal(a.shape))
    assert nnz_fraction(dense) == 1.0
    v = c.to_vector()
    assert nnz_fraction(soft_threshold(v, 1.0)) < nnz_fraction(v)
    assert nnz_fraction(np.array([1e-13, 1e-11])) == 0.5
    with pytest.raises(ValueError):
        nnz_fraction(np.array([]))


def test_ssim_identity_and_symmetry():
    rng = np.random.default_rng(4)
    a, b = rng.random((32, 32)), rng.random((32, 32))
    assert ssim(a, a) == 1.0
    assert abs(ssim(a, b) - ssim(b, a)) <= 1e-12
    assert -1 <= ssim(a, b) < 1


def test_ssim_negative_of_chart_is_dissimilar():
    a = synthetic_chart(64, 64)
    assert ssim(a, 1.0 - a) < 0.5


def test_ssim_constant_images():
    # only the stabilizers remain: luminance term of two flat levels
    a, b = np.full((16, 16), 0.2), np.full((16, 16), 0.6)
    c1 = (0.01) ** 2
    expected = (2 * 0.2 * 0.6 + c1) / (0.2 ** 2 + 0.6 ** 2 + c1)
    assert ssim(a, b) == pytest.approx(expected, rel=1e-12)


def test_ssim_validation():
    with pytest.raises(ValueError):
        ssim(np.ones((8, 8)), np.ones((8, 8)))  # smaller than the window
    with pytest.raises(ValueError):
        ssim(np.ones((16, 16)), np.ones((16, 17)))
    with pytest.raises(ValueError):
        SsimParams(window=10)
    assert ssim_map(np.ones((20, 16)), np.ones((20, 16))).shape == (10, 6)
