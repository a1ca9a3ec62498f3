"""Penalties: l1 prox, Huber loss, first differences and the smoothed TV term."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linop import LinearOperator

__all__ = [
    "soft_threshold",
    "HuberSpec",
    "huber_value",
    "huber_grad",
    "diff",
    "diff_adjoint",
    "diff_op",
    "tv_soft_value",
    "tv_soft_grad",
]


def soft_threshold(v, tau: float) -> np.ndarray:
    """Prox of ``tau * ||.||_1``: ``sign(v) * max(|v| - tau, 0)``."""
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


@dataclass(frozen=True)
class HuberSpec:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"Huber delta must be positive, got {self.delta}")


def _delta(spec) -> float:
    return spec.delta if isinstance(spec, HuberSpec) else HuberSpec(float(spec)).delta


def huber_value(z, spec) -> float:
    """Sum of ``z^2/2`` for ``|z| <= delta`` and ``delta (|z| - delta/2)`` beyond."""
    d = _delta(spec)
    a = np.abs(np.asarray(z, dtype=np.float64))
    return float(np.sum(np.where(a <= d, 0.5 * a * a, d * (a - 0.5 * d))))


def huber_grad(z, spec) -> np.ndarray:
    d = _delta(spec)
    z = np.asarray(z, dtype=np.float64)
    return np.clip(z, -d, d)


def diff(h) -> np.ndarray:
    return np.diff(np.asarray(h, dtype=np.float64))


def diff_adjoint(g) -> np.ndarray:
    """``D^T g``: ``[-g0, g0 - g1, ..., g_{n-3} - g_{n-2}, g_{n-2}]``."""
    g = np.asarray(g, dtype=np.float64)
    out = np.zeros(g.size + 1)
    out[:-1] -= g
    out[1:] += g
    return out


def diff_op(n: int) -> LinearOperator:
    """First differences ``(Dh)_j = h_{j+1} - h_j`` as an operator ``R^n -> R^(n-1)``."""
    if n < 2:
        raise ValueError(f"difference operator needs n >= 2, got {n}")
    return LinearOperator(n, n - 1, diff, diff_adjoint, name=f"D({n})")


def tv_soft_value(h, spec) -> float:
    """Huber-smoothed total variation ``L_delta(Dh) / delta``."""
    h = np.asarray(h, dtype=np.float64)
    if h.size < 2:
        raise ValueError("TV term needs at least two samples")
    return huber_value(diff(h), spec) / _delta(spec)


def tv_soft_grad(h, spec) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.size < 2:
        raise ValueError("TV term needs at least two samples")
    return diff_adjoint(huber_grad(diff(h), spec)) / _delta(spec)
