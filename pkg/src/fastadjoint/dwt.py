"""Multi-stage wavelet analysis, reconstruction and their exact adjoints.

Per stage the transforms factor through a signal extension ``E``::

    analysis        W^+  = Wzpd^+ E          (primal filters)
    reconstruction  W    = E^+ Wzpd          (transpose of dual analysis)
    adjoint of W    W^*  = dual-Wzpd^+ (E^+)^T
    adjoint of W^+  (W^+)^* = E^T dual-Wzpd

where ``Wzpd^+`` is one analysis stage on a zero-padded signal (full
convolution, keep odd samples).  Zero-padded (``zpd``) transforms skip the
explicit extension because the full convolution already pads with zeros.
For the other modes the stage sees ``M + 2*pad`` samples and emits
``floor((M + 2*pad + L - 1)/2)`` coefficients per channel.

1-D coefficients live in :class:`WaveletCoeffs`, 2-D in
:class:`WaveletCoeffs2D`; both record the per-level lengths that the inverse
and adjoint transforms take as ground truth.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .extend import (ExtensionKind, ExtensionSpec, extend, extend_adjoint, extend_pinv,
                     extend_pinv_adjoint)
from .filters import Filter, FilterBank, get_filter_bank
from .linop import LinearOperator, dense_pinv, to_dense

__all__ = [
    "WaveletCoeffs",
    "WaveletCoeffs2D",
    "wavelet_extension",
    "stage_length",
    "level_lengths",
    "level_shapes",
    "analyze_stage_zpd",
    "synth_stage_zpd",
    "analyze",
    "synthesize",
    "synthesize_adjoint",
    "analyze_adjoint",
    "analyze2d",
    "synthesize2d",
    "synthesize2d_adjoint",
    "analyze2d_adjoint",
    "synthesis_operator",
    "analysis_operator",
    "synthesis2d_operator",
    "analysis2d_operator",
    "frame_relation_check",
    "ADJOINT_MODES",
]

ADJOINT_MODES = ("true_adjoint", "pinv_approx")


# --------------------------------------------------------------------------
# coefficient containers


@dataclass
class WaveletCoeffs:
    """1-D pyramid: coarsest approximation plus details, coarsest first.

    ``level_lengths = (N, K_1, ..., K_J)``: the input length followed by the
    approximation length after each stage.  ``details[-1]`` (finest) has
    length ``K_1`` and ``details[0]`` has length ``K_J``.
    """

    approx: np.ndarray
    details: list
    level_lengths: tuple

    def __post_init__(self):
        self.approx = np.asarray(self.approx, dtype=np.float64)
        self.details = [np.asarray(d, dtype=np.float64) for d in self.details]
        self.level_lengths = tuple(int(n) for n in self.level_lengths)
        if len(self.level_lengths) != len(self.details) + 1:
            raise ValueError("level_lengths must have one more entry than details")
        expected = self.level_lengths[:0:-1]
        if self.approx.shape != (expected[0],) or any(
                d.shape != (k,) for d, k in zip(self.details, expected)):
            raise ValueError(f"coefficient lengths inconsistent with level_lengths "
                             f"{self.level_lengths}")

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def size(self) -> int:
        return self.approx.size + sum(d.size for d in self.details)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.approx, *self.details])

    @classmethod
    def from_vector(cls, v, lengths) -> "WaveletCoeffs":
        lengths = tuple(lengths)
        sizes = [lengths[-1]] + list(lengths[:0:-1])
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (sum(sizes),):
            raise ValueError(f"expected {sum(sizes)} coefficients, got shape {v.shape}")
        parts = np.split(v, np.cumsum(sizes)[:-1])
        return cls(parts[0], parts[1:], lengths)

    def map(self, func) -> "WaveletCoeffs":
        return WaveletCoeffs(func(self.approx), [func(d) for d in self.details],
                             self.level_lengths)


@dataclass
class WaveletCoeffs2D:
    """2-D pyramid.  ``details[j] = (lh, hl, hh)``, coarsest level first.

    The first letter of a subband names the filter applied along rows
    (axis 1), the second the filter along columns (axis 0).
    ``level_shapes = ((H, W), shape after stage 1, ..., after stage J)``.
    """

    approx: np.ndarray
    details: list
    level_shapes: tuple = field(default=())

    def __post_init__(self):
        self.approx = np.asarray(self.approx, dtype=np.float64)
        self.details = [tuple(np.asarray(b, dtype=np.float64) for b in lvl)
                        for lvl in self.details]
        self.level_shapes = tuple(tuple(int(s) for s in sh) for sh in self.level_shapes)
        if len(self.level_shapes) != len(self.details) + 1:
            raise ValueError("level_shapes must have one more entry than details")
        expected = self.level_shapes[:0:-1]
        if self.approx.shape != expected[0]:
            raise ValueError("approximation shape inconsistent with level_shapes")
        for lvl, sh in zip(self.details, expected):
            if len(lvl) != 3 or any(b.shape != sh for b in lvl):
                raise ValueError(f"detail subbands inconsistent with level_shapes "
                                 f"{self.level_shapes}")

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def size(self) -> int:
        return self.approx.size + sum(b.size for lvl in self.details for b in lvl)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.approx.ravel()]
                              + [b.ravel() for lvl in self.details for b in lvl])

    @classmethod
    def from_vector(cls, v, shapes) -> "WaveletCoeffs2D":
        shapes = tuple(tuple(s) for s in shapes)
        v = np.asarray(v, dtype=np.float64)
        total = _coeff_count2d(shapes)
        if v.shape != (total,):
            raise ValueError(f"expected {total} coefficients, got shape {v.shape}")
        pos = 0

        def take(sh):
            nonlocal pos
            n = sh[0] * sh[1]
            out = v[pos:pos + n].reshape(sh)
            pos += n
            return out

        approx = take(shapes[-1])
        details = [tuple(take(sh) for _ in range(3)) for sh in shapes[:0:-1]]
        return cls(approx, details, shapes)

    def map(self, func) -> "WaveletCoeffs2D":
        return WaveletCoeffs2D(func(self.approx),
                               [tuple(func(b) for b in lvl) for lvl in self.details],
                               self.level_shapes)


def _coeff_count2d(shapes) -> int:
    return shapes[-1][0] * shapes[-1][1] + 3 * sum(h * w for h, w in shapes[1:])


# --------------------------------------------------------------------------
# single-stage kernels (last axis)


def _layout(f: Filter, n_in: int, n_coef: int) -> tuple[int, int]:
    # buffer offset and length so every index 2k+1-start-i lands inside
    lowest = 1 - f.start - (len(f.taps) - 1)
    highest = 2 * (n_coef - 1) + 1 - f.start
    off = max(0, -lowest)
    return off, max(n_in, highest + 1) + off


_DENSE_STAGE_LIMIT = 1024


@lru_cache(maxsize=512)
def _stage_matrix(f: Filter, n_in: int, n_coef: int) -> np.ndarray:
    # row k holds the taps hitting sample 2k+1-start-i; used for short axes only
    m = np.zeros((n_coef, n_in))
    k = np.arange(n_coef)
    for i, t in enumerate(f.taps):
        j = 2 * k + 1 - f.start - i
        ok = (j >= 0) & (j < n_in)
        m[k[ok], j[ok]] += t
    m.setflags(write=False)
    return m


def _down(y: np.ndarray, f: Filter, n_coef: int) -> np.ndarray:
    n_in = y.shape[-1]
    if n_in <= _DENSE_STAGE_LIMIT:
        return y @ _stage_matrix(f, n_in, n_coef).T
    off, size = _layout(f, n_in, n_coef)
    buf = np.zeros(y.shape[:-1] + (size,))
    buf[..., off:off + n_in] = y
    out = np.zeros(y.shape[:-1] + (n_coef,))
    for i, t in enumerate(f.taps):
        b0 = 1 - f.start - i + off
        out += t * buf[..., b0:b0 + 2 * n_coef - 1:2]
    return out


def _up(c: np.ndarray, f: Filter, n_out: int) -> np.ndarray:
    n_coef = c.shape[-1]
    if n_out <= _DENSE_STAGE_LIMIT:
        return c @ _stage_matrix(f, n_out, n_coef)
    off, size = _layout(f, n_out, n_coef)
    buf = np.zeros(c.shape[:-1] + (size,))
    for i, t in enumerate(f.taps):
        b0 = 1 - f.start - i + off
        buf[..., b0:b0 + 2 * n_coef - 1:2] += t * c
    return buf[..., off:off + n_out]


def _n_coef(m: int, fb: FilterBank) -> int:
    return (m + fb.length - 1) // 2


def analyze_stage_zpd(y, fb, use_dual: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """One zero-padded analysis stage along the last axis.

    Full convolution with the (dual, if ``use_dual``) analysis lowpass and
    highpass filters, keeping odd-indexed samples.  Each channel has
    ``floor((M + L - 1)/2)`` coefficients.
    """
    fb = get_filter_bank(fb)
    y = np.asarray(y, dtype=np.float64)
    m = y.shape[-1]
    if m < 1:
        raise ValueError("analysis stage needs at least one sample")
    lo, hi = fb.analysis_pair(use_dual)
    k = _n_coef(m, fb)
    return _down(y, lo, k), _down(y, hi, k)


def synth_stage_zpd(approx, detail, fb, use_dual: bool = False, out_len: int | None = None):
    """One zero-padded synthesis stage, the exact inverse of :func:`analyze_stage_zpd`.

    Upsamples, filters with the synthesis filters and keeps the ``out_len``
    samples aligned with the analysis.  This is implemented as the transpose
    of the dual analysis stage, so its adjoint is that stage exactly.
    """
    fb = get_filter_bank(fb)
    approx = np.asarray(approx, dtype=np.float64)
    detail = np.asarray(detail, dtype=np.float64)
    if approx.shape != detail.shape:
        raise ValueError(f"approx {approx.shape} and detail {detail.shape} differ in shape")
    k = approx.shape[-1]
    if out_len is None:
        out_len = 2 * k - fb.length + 1
    if out_len < 1 or _n_coef(out_len, fb) != k:
        raise ValueError(f"{k} coefficients per channel cannot reconstruct {out_len} samples "
                         f"with L={fb.length}")
    lo, hi = fb.analysis_pair(not use_dual)
    return _up(approx, lo, out_len) + _up(detail, hi, out_len)


# --------------------------------------------------------------------------
# boundary-aware stages


def wavelet_extension(fb, spec) -> ExtensionSpec | None:
    """Resolve the per-stage extension; ``None`` means implicit zero padding.

    ``spec`` may be an :class:`ExtensionSpec` (its pad is used) or an
    extension kind, in which case ``pad = L - 1``.
    """
    fb = get_filter_bank(fb)
    if isinstance(spec, ExtensionSpec):
        ext = spec
    else:
        ext = ExtensionSpec(ExtensionKind(spec), fb.pad)
    if ext.kind is ExtensionKind.ZPD:
        return None
    return ext


def stage_length(m: int, fb, ext: ExtensionSpec | None) -> int:
    fb = get_filter_bank(fb)
    me = m if ext is None else ext.extended_length(m)
    return _n_coef(me, fb)


def _ext_len(m: int, ext: ExtensionSpec | None) -> int:
    return m if ext is None else ext.extended_length(m)


def level_lengths(n: int, fb, spec, levels: int) -> tuple[int, ...]:
    """``(N, K_1, ..., K_J)``; raises naming the first level that cannot be extended."""
    fb = get_filter_bank(fb)
    ext = wavelet_extension(fb, spec)
    if levels < 1:
        raise ValueError("number of stages must be >= 1")
    out = [int(n)]
    for j in range(levels):
        m = out[-1]
        if m < 1 or (ext is not None and m < ext.pad):
            raise ValueError(f"stage {j + 1}: length {m} is too short for "
                             f"{ext.kind.value if ext else 'zpd'} extension with pad "
                             f"{ext.pad if ext else 0}; use fewer stages")
        out.append(stage_length(m, fb, ext))
    return tuple(out)


def level_shapes(shape, fb, spec, levels: int) -> tuple[tuple[int, int], ...]:
    rows = level_lengths(shape[0], fb, spec, levels)
    cols = level_lengths(shape[1], fb, spec, levels)
    return tuple(zip(rows, cols))


def _a_stage(y, fb, ext, dual=False):
    ye = y if ext is None else extend(y, ext)
    return analyze_stage_zpd(ye, fb, use_dual=dual)


def _s_stage(a, d, fb, ext, m, dual=False):
    z = synth_stage_zpd(a, d, fb, use_dual=dual, out_len=_ext_len(m, ext))
    return z if ext is None else extend_pinv(z, ext, m)


def _s_adj_stage(v, fb, ext, dual=False):
    ve = v if ext is None else extend_pinv_adjoint(v, ext)
    return analyze_stage_zpd(ve, fb, use_dual=not dual)


def _a_adj_stage(a, d, fb, ext, m, dual=False):
    z = synth_stage_zpd(a, d, fb, use_dual=not dual, out_len=_ext_len(m, ext))
    return z if ext is None else extend_adjoint(z, ext, m)


# --------------------------------------------------------------------------
# 1-D multi-stage transforms


def _check_signal(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"expected a 1-D signal, got shape {y.shape}")
    return y


def analyze(y, fb, levels: int, spec, dual: bool = False) -> WaveletCoeffs:
    """Multi-stage analysis ``W^+`` (dual filters if ``dual``)."""
    fb = get_filter_bank(fb)
    y = _check_signal(y)
    ext = wavelet_extension(fb, spec)
    lengths = level_lengths(y.size, fb, spec, levels)
    details = []
    a = y
    for _ in range(levels):
        a, d = _a_stage(a, fb, ext, dual)
        details.insert(0, d)
    return WaveletCoeffs(a, details, lengths)


def synthesize(x: WaveletCoeffs, fb, spec, dual: bool = False) -> np.ndarray:
    """Multi-stage reconstruction ``W``; left inverse of :func:`analyze`."""
    fb = get_filter_bank(fb)
    ext = wavelet_extension(fb, spec)
    _check_lengths(x.level_lengths, fb, spec)
    a = x.approx
    for j, d in enumerate(x.details):
        a = _s_stage(a, d, fb, ext, x.level_lengths[x.levels - 1 - j], dual)
    return a


def synthesize_adjoint(v, fb, spec, lengths, dual: bool = False) -> WaveletCoeffs:
    """The true adjoint ``W^*`` of :func:`synthesize`.

    Per stage: ``(E^+)^T`` then zero-padded analysis with the dual filters.
    For orthogonal banks under ``zpd`` this coincides with :func:`analyze`.
    """
    fb = get_filter_bank(fb)
    v = _check_signal(v)
    ext = wavelet_extension(fb, spec)
    lengths = tuple(lengths)
    _check_lengths(lengths, fb, spec)
    if v.size != lengths[0]:
        raise ValueError(f"signal length {v.size} != level_lengths[0] = {lengths[0]}")
    details = []
    a = v
    for _ in range(len(lengths) - 1):
        a, d = _s_adj_stage(a, fb, ext, dual)
        details.insert(0, d)
    return WaveletCoeffs(a, details, lengths)


def analyze_adjoint(x: WaveletCoeffs, fb, spec, dual: bool = False) -> np.ndarray:
    """The true adjoint ``(W^+)^*`` of :func:`analyze`: dual synthesis then ``E^T``."""
    fb = get_filter_bank(fb)
    ext = wavelet_extension(fb, spec)
    _check_lengths(x.level_lengths, fb, spec)
    a = x.approx
    for j, d in enumerate(x.details):
        a = _a_adj_stage(a, d, fb, ext, x.level_lengths[x.levels - 1 - j], dual)
    return a


def _check_lengths(lengths, fb, spec) -> None:
    if tuple(lengths) != level_lengths(lengths[0], fb, spec, len(lengths) - 1):
        raise ValueError(f"level_lengths {tuple(lengths)} do not match wavelet "
                         f"{get_filter_bank(fb).name} with extension {spec!r}")


# --------------------------------------------------------------------------
# 2-D separable transforms


def _on_axis(func, arrays, axis: int, *args):
    moved = [np.moveaxis(a, axis, -1) for a in arrays]
    out = func(*moved, *args)
    if isinstance(out, tuple):
        return tuple(np.moveaxis(o, -1, axis) for o in out)
    return np.moveaxis(out, -1, axis)


def _check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    return img


def analyze2d(img, fb, levels: int, spec, dual: bool = False) -> WaveletCoeffs2D:
    """Separable analysis: rows (axis 1) then columns (axis 0) at every stage."""
    fb = get_filter_bank(fb)
    img = _check_image(img)
    ext = wavelet_extension(fb, spec)
    shapes = level_shapes(img.shape, fb, spec, levels)
    details = []
    a = img
    for _ in range(levels):
        r_lo, r_hi = _on_axis(_a_stage, [a], 1, fb, ext, dual)
        a, lh = _on_axis(_a_stage, [r_lo], 0, fb, ext, dual)
        hl, hh = _on_axis(_a_stage, [r_hi], 0, fb, ext, dual)
        details.insert(0, (lh, hl, hh))
    return WaveletCoeffs2D(a, details, shapes)


def synthesize2d(x: WaveletCoeffs2D, fb, spec, dual: bool = False) -> np.ndarray:
    fb = get_filter_bank(fb)
    ext = wavelet_extension(fb, spec)
    _check_shapes(x.level_shapes, fb, spec)
    a = x.approx
    for j, (lh, hl, hh) in enumerate(x.details):
        h, w = x.level_shapes[x.levels - 1 - j]
        r_lo = _on_axis(_s_stage, [a, lh], 0, fb, ext, h, dual)
        r_hi = _on_axis(_s_stage, [hl, hh], 0, fb, ext, h, dual)
        a = _on_axis(_s_stage, [r_lo, r_hi], 1, fb, ext, w, dual)
    return a


def synthesize2d_adjoint(v, fb, spec, shapes, dual: bool = False) -> WaveletCoeffs2D:
    """True adjoint of :func:`synthesize2d`; 1-D adjoints in reverse axis order."""
    fb = get_filter_bank(fb)
    v = _check_image(v)
    ext = wavelet_extension(fb, spec)
    shapes = tuple(tuple(s) for s in shapes)
    _check_shapes(shapes, fb, spec)
    if v.shape != shapes[0]:
        raise ValueError(f"image shape {v.shape} != level_shapes[0] = {shapes[0]}")
    details = []
    a = v
    for _ in range(len(shapes) - 1):
        r_lo, r_hi = _on_axis(_s_adj_stage, [a], 1, fb, ext, dual)
        a, lh = _on_axis(_s_adj_stage, [r_lo], 0, fb, ext, dual)
        hl, hh = _on_axis(_s_adj_stage, [r_hi], 0, fb, ext, dual)
        details.insert(0, (lh, hl, hh))
    return WaveletCoeffs2D(a, details, shapes)


def analyze2d_adjoint(x: WaveletCoeffs2D, fb, spec, dual: bool = False) -> np.ndarray:
    fb = get_filter_bank(fb)
    ext = wavelet_extension(fb, spec)
    _check_shapes(x.level_shapes, fb, spec)
    a = x.approx
    for j, (lh, hl, hh) in enumerate(x.details):
        h, w = x.level_shapes[x.levels - 1 - j]
        r_lo = _on_axis(_a_adj_stage, [a, lh], 0, fb, ext, h, dual)
        r_hi = _on_axis(_a_adj_stage, [hl, hh], 0, fb, ext, h, dual)
        a = _on_axis(_a_adj_stage, [r_lo, r_hi], 1, fb, ext, w, dual)
    return a


def _check_shapes(shapes, fb, spec) -> None:
    if tuple(tuple(s) for s in shapes) != level_shapes(shapes[0], fb, spec, len(shapes) - 1):
        raise ValueError(f"level_shapes {tuple(shapes)} do not match wavelet "
                         f"{get_filter_bank(fb).name} with extension {spec!r}")


# --------------------------------------------------------------------------
# operator views


def _mode(adjoint_mode: str) -> str:
    mode = adjoint_mode.replace("-", "_")
    if mode == "true":
        mode = "true_adjoint"
    if mode not in ADJOINT_MODES:
        raise ValueError(f"adjoint_mode must be one of {ADJOINT_MODES}, got {adjoint_mode!r}")
    return mode


def synthesis_operator(fb, spec, levels: int, n: int,
                       adjoint_mode: str = "true_adjoint") -> LinearOperator:
    """``W`` on flattened coefficients.

    With ``adjoint_mode="pinv_approx"`` the "adjoint" slot holds the analysis
    ``W^+`` instead of ``W^*``; that operator deliberately fails the dot test
    unless the frame is tight.
    """
    fb = get_filter_bank(fb)
    mode = _mode(adjoint_mode)
    lengths = level_lengths(n, fb, spec, levels)
    ncoef = lengths[-1] + sum(lengths[1:])

    def fwd(v):
        return synthesize(WaveletCoeffs.from_vector(v, lengths), fb, spec)

    if mode == "true_adjoint":
        def adj(y):
            return synthesize_adjoint(y, fb, spec, lengths).to_vector()
    else:
        def adj(y):
            return analyze(y, fb, levels, spec).to_vector()

    return LinearOperator(ncoef, n, fwd, adj, name=f"W[{fb.name},{_spec_name(spec)},J={levels}]")


def analysis_operator(fb, spec, levels: int, n: int, dual: bool = False) -> LinearOperator:
    """``W^+`` on flattened coefficients with its true adjoint."""
    fb = get_filter_bank(fb)
    lengths = level_lengths(n, fb, spec, levels)
    ncoef = lengths[-1] + sum(lengths[1:])
    return LinearOperator(
        n, ncoef,
        lambda y: analyze(y, fb, levels, spec, dual).to_vector(),
        lambda v: analyze_adjoint(WaveletCoeffs.from_vector(v, lengths), fb, spec, dual),
        name=f"W+[{fb.name},{_spec_name(spec)},J={levels}]")


def synthesis2d_operator(fb, spec, levels: int, shape,
                         adjoint_mode: str = "true_adjoint") -> LinearOperator:
    fb = get_filter_bank(fb)
    mode = _mode(adjoint_mode)
    shape = tuple(int(s) for s in shape)
    shapes = level_shapes(shape, fb, spec, levels)
    ncoef = _coeff_count2d(shapes)

    def fwd(v):
        return synthesize2d(WaveletCoeffs2D.from_vector(v, shapes), fb, spec).ravel()

    if mode == "true_adjoint":
        def adj(y):
            return synthesize2d_adjoint(y.reshape(shape), fb, spec, shapes).to_vector()
    else:
        def adj(y):
            return analyze2d(y.reshape(shape), fb, levels, spec).to_vector()

    return LinearOperator(ncoef, shape[0] * shape[1], fwd, adj,
                          name=f"W2d[{fb.name},{_spec_name(spec)},J={levels}]")


def analysis2d_operator(fb, spec, levels: int, shape, dual: bool = False) -> LinearOperator:
    fb = get_filter_bank(fb)
    shape = tuple(int(s) for s in shape)
    shapes = level_shapes(shape, fb, spec, levels)
    return LinearOperator(
        shape[0] * shape[1], _coeff_count2d(shapes),
        lambda y: analyze2d(y.reshape(shape), fb, levels, spec, dual).to_vector(),
        lambda v: analyze2d_adjoint(WaveletCoeffs2D.from_vector(v, shapes), fb, spec,
                                    dual).ravel(),
        name=f"W+2d[{fb.name},{_spec_name(spec)},J={levels}]")


def _spec_name(spec) -> str:
    if isinstance(spec, ExtensionSpec):
        return f"{spec.kind.value}/{spec.pad}"
    return ExtensionKind(spec).value


# --------------------------------------------------------------------------
# frame relations


def frame_relation_check(fb, n: int, levels: int = 1) -> dict:
    """Dense check of the primal/dual frame identities for zero-padded transforms.

    ``phi`` is the analysis matrix, ``phi_dual`` the dual-filter analysis and
    ``recon`` the reconstruction matrix.  All entries are max-abs deviations.
    """
    fb = get_filter_bank(fb)
    phi = to_dense(analysis_operator(fb, "zpd", levels, n))
    phi_dual = to_dense(analysis_operator(fb, "zpd", levels, n, dual=True))
    recon = to_dense(synthesis_operator(fb, "zpd", levels, n))
    recon_adj = to_dense(synthesis_operator(fb, "zpd", levels, n).T)
    pinv = dense_pinv(phi)
    eye_n = np.eye(n)
    eye_p = np.eye(phi.shape[0])
    report = {
        "wavelet": fb.name,
        "n": n,
        "levels": levels,
        "coefficients": phi.shape[0],
        "pinv_left_inverse": float(np.abs(pinv @ phi - eye_n).max()),
        "recon_left_inverse": float(np.abs(recon @ phi - eye_n).max()),
        "dual_synthesis_vs_pinv": float(np.abs(phi_dual.T - pinv).max()),
        "pinv_adjoint_vs_dual": float(np.abs(pinv.T - phi_dual).max()),
        "recon_adjoint_vs_dual": float(np.abs(recon_adj - phi_dual).max()),
        "recon_vs_pinv": float(np.abs(recon - pinv).max()),
        "phi_pinv_minus_identity": float(np.abs(phi @ pinv - eye_p).max()),
        "dual_equals_primal": float(np.abs(phi_dual - phi).max()),
    }
    if fb.orthogonal:
        report["tightness"] = float(np.abs(phi.T @ phi - eye_n).max())
    return report
