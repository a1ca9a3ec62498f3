"""Convolution operators: 1-D full convolution / valid correlation, and 2-D blur.

``conv_full`` and ``xcorr_valid`` are an exact transpose pair: with ``s``
fixed, ``h -> h * s`` is multiplication by the banded ``(K+N-1) x K`` matrix
``S`` and its adjoint ``r -> S^T r`` is the full-overlap correlation of ``r``
with ``s``.

The blur ``R`` is composed as crop o circular convolution o extension, so
its adjoint is assembled from the adjoints of those three pieces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extend import ExtensionKind, ExtensionSpec, extension2d_operator
from .linop import LinearOperator, compose

__all__ = [
    "conv_full",
    "conv_full_fft",
    "xcorr_valid",
    "conv_op_fixed_s",
    "conv_op_fixed_h",
    "Psf",
    "gaussian_psf",
    "psf_from_array",
    "circular_conv2d",
    "circular_conv_op",
    "crop_op",
    "blur_op",
]


def _vec(a, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"{what}: expected a nonempty 1-D array, got shape {a.shape}")
    return a


def conv_full(h, s) -> np.ndarray:
    """Full linear convolution, length ``K + N - 1``."""
    return np.convolve(_vec(h, "conv_full"), _vec(s, "conv_full"), mode="full")


def conv_full_fft(h, s) -> np.ndarray:
    """Full linear convolution through a zero-padded real FFT."""
    h, s = _vec(h, "conv_full_fft"), _vec(s, "conv_full_fft")
    n = h.size + s.size - 1
    nfft = 1 << (n - 1).bit_length()
    return np.fft.irfft(np.fft.rfft(h, nfft) * np.fft.rfft(s, nfft), nfft)[:n]


def xcorr_valid(r, s) -> np.ndarray:
    """``out[n] = sum_k s[k] r[k + n]`` over full-overlap lags, length ``len(r) - N + 1``."""
    r, s = _vec(r, "xcorr_valid"), _vec(s, "xcorr_valid")
    if r.size < s.size:
        raise ValueError(f"xcorr_valid: residual length {r.size} shorter than filter {s.size}")
    return np.correlate(r, s, mode="valid")


def conv_op_fixed_s(s, k: int) -> LinearOperator:
    """``h -> h * s`` for length-``k`` ``h``; adjoint is correlation against ``s``."""
    s = _vec(s, "conv_op_fixed_s").copy()
    s.setflags(write=False)
    return LinearOperator(k, k + s.size - 1, lambda h: conv_full(h, s),
                          lambda r: xcorr_valid(r, s), name=f"ConvS(K={k},N={s.size})")


def conv_op_fixed_h(h, n: int) -> LinearOperator:
    """``s -> h * s`` for length-``n`` ``s``; adjoint is correlation against ``h``."""
    h = _vec(h, "conv_op_fixed_h").copy()
    h.setflags(write=False)
    return LinearOperator(n, h.size + n - 1, lambda s: conv_full(h, s),
                          lambda r: xcorr_valid(r, h), name=f"ConvH(K={h.size},N={n})")


# --------------------------------------------------------------------------
# 2-D blur


@dataclass(frozen=True)
class Psf:
    """Centred point spread function with odd side lengths."""

    kernel: np.ndarray
    sigma: float | None = None

    def __post_init__(self):
        k = np.array(self.kernel, dtype=np.float64)
        if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
            raise ValueError(f"PSF must be 2-D with odd sides, got shape {k.shape}")
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @property
    def half_width(self) -> tuple[int, int]:
        return self.kernel.shape[0] // 2, self.kernel.shape[1] // 2


def gaussian_psf(side: int, sigma: float) -> Psf:
    """Unit-sum samples of ``exp(-(i^2 + j^2) / (2 sigma^2))`` on a centred grid."""
    if side < 1 or side % 2 == 0:
        raise ValueError(f"PSF side must be a positive odd integer, got {side}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = np.arange(side) - side // 2
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * sigma ** 2))
    return Psf(g / g.sum(), float(sigma))


def psf_from_array(kernel, normalize: bool = True) -> Psf:
    k = np.asarray(kernel, dtype=np.float64)
    if normalize:
        total = k.sum()
        if total == 0:
            raise ValueError("PSF sums to zero; cannot normalize")
        k = k / total
    return Psf(k)


def _circ_direct(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    rh, rw = kernel.shape[0] // 2, kernel.shape[1] // 2
    out = np.zeros_like(img)
    for u in range(kernel.shape[0]):
        for v in range(kernel.shape[1]):
            if kernel[u, v] != 0.0:
                out += kernel[u, v] * np.roll(img, (u - rh, v - rw), axis=(0, 1))
    return out


def _circ_fft(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    h, w = img.shape
    kh, kw = kernel.shape
    if kh > h or kw > w:
        return _circ_direct(img, kernel)
    embed = np.zeros((h, w))
    embed[:kh, :kw] = kernel
    embed = np.roll(embed, (-(kh // 2), -(kw // 2)), axis=(0, 1))
    return np.fft.irfft2(np.fft.rfft2(img) * np.fft.rfft2(embed), s=(h, w))


def circular_conv2d(img, kernel, method: str = "auto", fft_threshold: int = 64) -> np.ndarray:
    """Centred circular convolution: ``out[i,j] = sum k[u,v] img[i-u+rh, j-v+rw]`` (mod size)."""
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if method == "auto":
        method = "fft" if max(img.shape) > fft_threshold else "direct"
    if method == "fft":
        return _circ_fft(img, kernel)
    if method == "direct":
        return _circ_direct(img, kernel)
    raise ValueError(f"unknown convolution method {method!r}")


def circular_conv_op(kernel, shape, method: str = "auto",
                     fft_threshold: int = 64) -> LinearOperator:
    """Circular convolution on vectorized images; adjoint uses the 180-degree rotated kernel."""
    kernel = np.array(kernel, dtype=np.float64)
    kernel.setflags(write=False)
    rotated = kernel[::-1, ::-1]
    shape = tuple(int(s) for s in shape)
    n = shape[0] * shape[1]
    return LinearOperator(
        n, n,
        lambda x: circular_conv2d(x.reshape(shape), kernel, method, fft_threshold).ravel(),
        lambda y: circular_conv2d(y.reshape(shape), rotated, method, fft_threshold).ravel(),
        name=f"CircConv{shape}")


def crop_op(shape, pad: tuple[int, int]) -> LinearOperator:
    """Keep the central part of an image padded by ``pad`` rows/cols per side."""
    ph, pw = pad
    h, w = shape
    big = (h + 2 * ph, w + 2 * pw)

    def fwd(x):
        return x.reshape(big)[ph:ph + h, pw:pw + w].ravel()

    def adj(y):
        out = np.zeros(big)
        out[ph:ph + h, pw:pw + w] = y.reshape(shape)
        return out.ravel()

    return LinearOperator(big[0] * big[1], h * w, fwd, adj, name=f"Crop{shape}")


def blur_op(psf: Psf, h: int, w: int, bc="sym", fft_threshold: int = 64,
            method: str = "auto") -> LinearOperator:
    """Blur ``R`` with boundary condition ``bc`` on row-major ``h x w`` images.

    ``R = Crop o CircConv(psf) o E``, with ``E`` the 2-D extension by the PSF
    half-width.  The wrap-around of the circular convolution only touches the
    padding, so the crop equals linear convolution of the extended image.
    """
    if not isinstance(psf, Psf):
        psf = psf_from_array(psf, normalize=False)
    rh, rw = psf.half_width
    if rh != rw:
        ext_r = ExtensionSpec(ExtensionKind(bc), rh)
        ext_c = ExtensionSpec(ExtensionKind(bc), rw)
        ext = compose(extension2d_operator(ext_r, (h, w + 2 * rw), "cols"),
                      extension2d_operator(ext_c, (h, w), "rows"))
    else:
        ext = extension2d_operator(ExtensionSpec(ExtensionKind(bc), rh), (h, w), "both")
    big = (h + 2 * rh, w + 2 * rw)
    conv = circular_conv_op(psf.kernel, big, method, fft_threshold)
    return compose(crop_op((h, w), (rh, rw)), compose(conv, ext))
