import numpy as np
import pytest

from fastadjoint.dwt import analyze_stage_zpd, synth_stage_zpd
from fastadjoint.filters import get_filter_bank

BANKS = ["haar", "db2", "db4", "cdf97"]


def test_aliases_and_unknown_name():
    assert get_filter_bank("db1").name == "haar"
    assert get_filter_bank("bior4.4").name == "cdf97"
    with pytest.raises(ValueError, match="haar"):
        get_filter_bank("sym8")


@pytest.mark.parametrize("name", ["haar", "db2", "db4"])
def test_orthogonal_banks_are_self_dual(name):
    fb = get_filter_bank(name)
    assert fb.orthogonal
    assert fb.dual_lo_a == fb.lo_a and fb.dual_hi_a == fb.hi_a
    lo = np.array(fb.lo_a.taps)
    # unit norm, orthogonal to even shifts
    assert abs(lo @ lo - 1) < 1e-15
    for shift in range(2, lo.size, 2):
        assert abs(lo[shift:] @ lo[:-shift]) < 1e-15


@pytest.mark.parametrize("name", BANKS)
def test_lowpass_dc_gain_is_sqrt2(name):
    fb = get_filter_bank(name)
    assert abs(sum(fb.lo_a.taps) - np.sqrt(2)) < 1e-14
    assert abs(sum(fb.dual_lo_a.taps) - np.sqrt(2)) < 1e-14
    assert abs(sum(fb.hi_a.taps)) < 1e-14


def test_cdf97_lengths_and_symmetry():
    fb = get_filter_bank("cdf97")
    assert not fb.orthogonal
    assert len(fb.lo_a.taps) == 9 and len(fb.dual_lo_a.taps) == 7
    assert fb.L == 9 and fb.pad == 8
    for f in (fb.lo_a, fb.dual_lo_a):
        np.testing.assert_array_equal(f.taps, f.taps[::-1])


def test_cdf97_against_published_values():
    # commonly tabulated 9/7 analysis lowpass, accurate to about 1e-12
    published = [0.026748757411, -0.016864118443, -0.078223266529, 0.266864118443,
                 0.602949018236]
    lo = np.array(get_filter_bank("cdf97").lo_a.taps) / np.sqrt(2)
    np.testing.assert_allclose(lo[:5], published, atol=1e-11)


@pytest.mark.parametrize("name", BANKS)
def test_biorthogonality(name):
    # one zpd stage is a left inverse on any signal
    fb = get_filter_bank(name)
    y = np.random.default_rng(0).standard_normal(11)
    a, d = analyze_stage_zpd(y, fb)
    np.testing.assert_allclose(synth_stage_zpd(a, d, fb, out_len=11), y, atol=1e-12)
