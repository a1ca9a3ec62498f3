"""Signal extension operators ``E`` and their adjoint / pseudoinverse relatives.

Three boundary conditions are supported, each adding ``pad`` samples per side:

* ``zpd``: zeros, ``[0..0, y, 0..0]``; ``E`` has orthonormal columns so
  ``E^+ = E^T``.
* ``sym``: half-point symmetric, ``[y[p-1]..y[0], y, y[N-1]..y[N-p]]``.
* ``per``: periodic, ``[y[N-p..N-1], y, y[0..p-1]]``.

All 1-D routines act along the last axis so they vectorize over leading
axes; the ``*2d`` variants apply them separably.  ``E^T E`` is diagonal for
these extensions, so for ``N > 2*pad`` the pseudoinverse is the adjoint with
the duplicated boundary samples halved.  Shorter signals use a dense
pseudoinverse.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linop import LinearOperator, dense_pinv

__all__ = [
    "ExtensionKind",
    "ExtensionSpec",
    "extend",
    "extend_adjoint",
    "extend_pinv",
    "extend_pinv_adjoint",
    "extension_matrix",
    "extend2d",
    "extend2d_adjoint",
    "extend2d_pinv",
    "extend2d_pinv_adjoint",
    "extension_operator",
    "extension_pinv_operator",
    "extension2d_operator",
    "extension2d_pinv_operator",
]


class ExtensionKind(str, enum.Enum):
    ZPD = "zpd"
    SYM = "sym"
    PER = "per"


@dataclass(frozen=True)
class ExtensionSpec:
    """Boundary extension: a kind plus ``pad`` samples added on each side."""

    kind: ExtensionKind
    pad: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ExtensionKind(self.kind))
        if int(self.pad) != self.pad or self.pad < 0:
            raise ValueError(f"pad must be a nonnegative integer, got {self.pad!r}")
        object.__setattr__(self, "pad", int(self.pad))

    def extended_length(self, n: int) -> int:
        return n + 2 * self.pad

    def check_length(self, n: int) -> None:
        if n < 1:
            raise ValueError("signal length must be >= 1")
        if self.kind is not ExtensionKind.ZPD and n < self.pad:
            raise ValueError(
                f"{self.kind.value} extension with pad={self.pad} needs at least {self.pad} "
                f"samples, got {n}")

    def closed_form(self, n: int) -> bool:
        """Whether ``E^+`` has the halved-boundary closed form at length ``n``."""
        return self.kind is ExtensionKind.ZPD or n > 2 * self.pad


def _last_axis(a, n: int | None, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 0:
        raise ValueError(f"{what}: expected at least a 1-D array")
    if n is not None and a.shape[-1] != n:
        raise ValueError(f"{what}: expected last-axis length {n}, got {a.shape[-1]}")
    return a


def extend(y, spec: ExtensionSpec) -> np.ndarray:
    """Apply ``E`` along the last axis."""
    y = _last_axis(y, None, "extend")
    n, p = y.shape[-1], spec.pad
    spec.check_length(n)
    if p == 0:
        return y.copy()
    if spec.kind is ExtensionKind.ZPD:
        left = np.zeros(y.shape[:-1] + (p,))
        right = left
    elif spec.kind is ExtensionKind.SYM:
        left = y[..., p - 1::-1]
        right = y[..., n - 1:n - p - 1 if n > p else None:-1]
    else:
        left = y[..., n - p:]
        right = y[..., :p]
    return np.concatenate([left, y, right], axis=-1)


def extend_adjoint(z, spec: ExtensionSpec, n: int) -> np.ndarray:
    """Apply ``E^T``: every sample collects the sum of all of its copies."""
    spec.check_length(n)
    p = spec.pad
    z = _last_axis(z, n + 2 * p, "extend_adjoint")
    out = z[..., p:p + n].copy()
    if p == 0 or spec.kind is ExtensionKind.ZPD:
        return out
    left, right = z[..., :p], z[..., p + n:]
    if spec.kind is ExtensionKind.SYM:
        out[..., :p] += left[..., ::-1]
        out[..., n - p:] += right[..., ::-1]
    else:
        out[..., n - p:] += left
        out[..., :p] += right
    return out


def _copy_counts(spec: ExtensionSpec, n: int) -> np.ndarray:
    # diagonal of E^T E, valid for the closed-form regime
    counts = np.ones(n)
    if spec.kind is not ExtensionKind.ZPD and spec.pad:
        counts[:spec.pad] += 1
        counts[n - spec.pad:] += 1
    return counts


@lru_cache(maxsize=256)
def _dense_matrices(spec: ExtensionSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    e = extension_matrix(spec, n)
    pinv = dense_pinv(e)
    pinv.setflags(write=False)
    return e, pinv


def extension_matrix(spec: ExtensionSpec, n: int) -> np.ndarray:
    """Dense ``(n + 2 pad) x n`` matrix of ``E``."""
    spec.check_length(n)
    m = extend(np.eye(n), spec).T
    return np.ascontiguousarray(m)


def extend_pinv(z, spec: ExtensionSpec, n: int) -> np.ndarray:
    """Apply ``E^+ = (E^T E)^{-1} E^T`` along the last axis."""
    spec.check_length(n)
    z = _last_axis(z, n + 2 * spec.pad, "extend_pinv")
    if spec.closed_form(n):
        return extend_adjoint(z, spec, n) / _copy_counts(spec, n)
    _, pinv = _dense_matrices(spec, n)
    return z @ pinv.T


def extend_pinv_adjoint(y, spec: ExtensionSpec) -> np.ndarray:
    """Apply ``(E^+)^T``: like :func:`extend` but duplicated copies share weight."""
    y = _last_axis(y, None, "extend_pinv_adjoint")
    n = y.shape[-1]
    spec.check_length(n)
    if spec.closed_form(n):
        return extend(y / _copy_counts(spec, n), spec)
    _, pinv = _dense_matrices(spec, n)
    return y @ pinv


_AXES = {"rows": (1,), "cols": (0,), "both": (1, 0)}


def _axes(axis: str) -> tuple[int, ...]:
    try:
        return _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be one of {sorted(_AXES)}, got {axis!r}") from None


def _along(func, img, axis: int, *args):
    moved = np.moveaxis(np.asarray(img, dtype=np.float64), axis, -1)
    return np.moveaxis(func(moved, *args), -1, axis)


def _check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    return img


def extend2d(img, spec: ExtensionSpec, axis: str = "both") -> np.ndarray:
    """Extend an image along ``rows`` (within each row), ``cols``, or ``both``."""
    out = _check_image(img)
    for ax in _axes(axis):
        out = _along(extend, out, ax, spec)
    return out


def extend2d_pinv(img, spec: ExtensionSpec, shape: tuple[int, int],
                  axis: str = "both") -> np.ndarray:
    out = _check_image(img)
    for ax in _axes(axis):
        out = _along(extend_pinv, out, ax, spec, shape[ax])
    return out


def extend2d_adjoint(img, spec: ExtensionSpec, shape: tuple[int, int],
                     axis: str = "both") -> np.ndarray:
    out = _check_image(img)
    for ax in reversed(_axes(axis)):
        out = _along(extend_adjoint, out, ax, spec, shape[ax])
    return out


def extend2d_pinv_adjoint(img, spec: ExtensionSpec, axis: str = "both") -> np.ndarray:
    out = _check_image(img)
    for ax in reversed(_axes(axis)):
        out = _along(extend_pinv_adjoint, out, ax, spec)
    return out


def extension_operator(spec: ExtensionSpec, n: int) -> LinearOperator:
    """``E`` as an operator ``R^n -> R^(n + 2 pad)`` with adjoint ``E^T``."""
    spec.check_length(n)
    m = spec.extended_length(n)
    return LinearOperator(n, m, lambda y: extend(y, spec),
                          lambda z: extend_adjoint(z, spec, n),
                          name=f"E_{spec.kind.value}(n={n},pad={spec.pad})")


def extension_pinv_operator(spec: ExtensionSpec, n: int) -> LinearOperator:
    """``E^+`` as an operator ``R^(n + 2 pad) -> R^n`` with adjoint ``(E^+)^T``."""
    spec.check_length(n)
    m = spec.extended_length(n)
    return LinearOperator(m, n, lambda z: extend_pinv(z, spec, n),
                          lambda y: extend_pinv_adjoint(y, spec),
                          name=f"Epinv_{spec.kind.value}(n={n},pad={spec.pad})")


def _extended_shape(spec: ExtensionSpec, shape, axis: str) -> tuple[int, int]:
    out = list(shape)
    for ax in _axes(axis):
        spec.check_length(shape[ax])
        out[ax] = spec.extended_length(shape[ax])
    return tuple(out)


def extension2d_operator(spec: ExtensionSpec, shape: tuple[int, int],
                         axis: str = "both") -> LinearOperator:
    """Separable 2-D ``E`` on row-major vectorized images."""
    shape = tuple(int(s) for s in shape)
    ext = _extended_shape(spec, shape, axis)
    return LinearOperator(
        shape[0] * shape[1], ext[0] * ext[1],
        lambda v: extend2d(v.reshape(shape), spec, axis).ravel(),
        lambda w: extend2d_adjoint(w.reshape(ext), spec, shape, axis).ravel(),
        name=f"E2d_{spec.kind.value}{shape}")


def extension2d_pinv_operator(spec: ExtensionSpec, shape: tuple[int, int],
                              axis: str = "both") -> LinearOperator:
    shape = tuple(int(s) for s in shape)
    ext = _extended_shape(spec, shape, axis)
    return LinearOperator(
        ext[0] * ext[1], shape[0] * shape[1],
        lambda w: extend2d_pinv(w.reshape(ext), spec, shape, axis).ravel(),
        lambda v: extend2d_pinv_adjoint(v.reshape(shape), spec, axis).ravel(),
        name=f"Epinv2d_{spec.kind.value}{shape}")
