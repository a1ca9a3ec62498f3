"""Two-channel filter banks: Haar, Daubechies (db2, db4) and CDF 9/7.

Each analysis filter is stored in convolution form together with the index
of its first tap.  One analysis stage on a zero-padded signal computes::

    c[k] = sum_i taps[i] * y[2k + 1 - start - i]

i.e. a full convolution sampled at odd positions.  Synthesis is the exact
transpose of the *dual* analysis, so the synthesis filters are the dual
analysis filters time-reversed (see :attr:`FilterBank.lo_s`).

Sign convention: for Haar the detail coefficient is
``(y[2k+1] - y[2k]) / sqrt(2)``.

The Daubechies and CDF 9/7 taps come from the spectral factorization of the
maximally flat halfband polynomial, evaluated in 50-digit arithmetic and
rounded to 20 significant digits.  All lowpass analysis filters have DC gain
sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Filter", "FilterBank", "get_filter_bank", "FILTER_BANK_NAMES"]


@dataclass(frozen=True)
class Filter:
    taps: tuple[float, ...]
    start: int = 0

    @property
    def array(self) -> np.ndarray:
        return np.array(self.taps)

    @property
    def stop(self) -> int:
        """One past the index of the last tap."""
        return self.start + len(self.taps)


@dataclass(frozen=True)
class FilterBank:
    """Primal and dual analysis filters of one wavelet family.

    ``length`` is the L used for coefficient counts (``floor((M + L - 1)/2)``
    per channel) and for the boundary pad ``L - 1``.  For orthogonal banks
    the dual filters equal the primal ones.
    """

    name: str
    lo_a: Filter
    hi_a: Filter
    dual_lo_a: Filter
    dual_hi_a: Filter
    length: int
    orthogonal: bool

    @property
    def L(self) -> int:
        return self.length

    @property
    def pad(self) -> int:
        return self.length - 1

    # synthesis filters, convolution form: reversed dual analysis taps
    @property
    def lo_s(self) -> np.ndarray:
        return self.dual_lo_a.array[::-1]

    @property
    def hi_s(self) -> np.ndarray:
        return self.dual_hi_a.array[::-1]

    @property
    def dual_lo_s(self) -> np.ndarray:
        return self.lo_a.array[::-1]

    @property
    def dual_hi_s(self) -> np.ndarray:
        return self.hi_a.array[::-1]

    def analysis_pair(self, dual: bool = False) -> tuple[Filter, Filter]:
        return (self.dual_lo_a, self.dual_hi_a) if dual else (self.lo_a, self.hi_a)


_SQRT1_2 = 0.70710678118654752440

_DB2 = (0.48296291314453414337, 0.83651630373780790558,
        0.22414386804201338103, -0.12940952255126038117)

_DB4 = (0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
        -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
        0.032883011666885199735, -0.010597401785069032105)

# CDF 9/7 lowpass pair: 9-tap analysis, 7-tap synthesis (both symmetric)
_CDF9 = (0.037828455506995461393, -0.023849465019380001913, -0.11062440441842340885,
         0.37740285561265376411, 0.85269867900940341931, 0.37740285561265376411,
         -0.11062440441842340885, -0.023849465019380001913, 0.037828455506995461393)
_CDF7 = (-0.064538882628938438637, -0.040689417609558436724, 0.41809227322221220084,
         0.78848561640566439785, 0.41809227322221220084, -0.040689417609558436724,
         -0.064538882628938438637)


def _orthogonal(name: str, lo: tuple[float, ...]) -> FilterBank:
    n = len(lo)
    hi = tuple((-1) ** k * lo[n - 1 - k] for k in range(n))
    lo_f, hi_f = Filter(lo), Filter(hi)
    return FilterBank(name, lo_f, hi_f, lo_f, hi_f, length=n, orthogonal=True)


def _cdf97() -> FilterBank:
    # lowpass pair centred on index 4; highpass pair centred on index 3, so the
    # 9-tap dual highpass starts at -1 and L stays 9
    lo = Filter(_CDF9, 0)
    hi = Filter(tuple(-((-1) ** k) * t for k, t in enumerate(_CDF7)), 0)
    dual_lo = Filter(_CDF7, 1)
    dual_hi = Filter(tuple((-1) ** k * t for k, t in enumerate(_CDF9)), -1)
    return FilterBank("cdf97", lo, hi, dual_lo, dual_hi, length=9, orthogonal=False)


_BANKS = {
    "haar": _orthogonal("haar", (_SQRT1_2, _SQRT1_2)),
    "db2": _orthogonal("db2", _DB2),
    "db4": _orthogonal("db4", _DB4),
    "cdf97": _cdf97(),
}
_ALIASES = {"db1": "haar", "bior4.4": "cdf97", "cdf9/7": "cdf97"}

FILTER_BANK_NAMES = tuple(_BANKS)


def get_filter_bank(name) -> FilterBank:
    if isinstance(name, FilterBank):
        return name
    key = str(name).lower()
    key = _ALIASES.get(key, key)
    try:
        return _BANKS[key]
    except KeyError:
        raise ValueError(
            f"unknown wavelet {name!r}; choose from {', '.join(FILTER_BANK_NAMES)}") from None
