"""Matrix-free linear operators with explicit adjoints.

Every operator in the package is a :class:`LinearOperator` acting on flat
float64 vectors.  Dense materialization (:func:`to_dense`) and the randomized
dot test (:func:`dot_test`) are the oracles used to check adjoints.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "LinearOperator",
    "identity",
    "matrix_operator",
    "compose",
    "to_dense",
    "dense_pinv",
    "dot_test",
]

VectorMap = Callable[[np.ndarray], np.ndarray]


class LinearOperator:
    """A linear map ``R^in_dim -> R^out_dim`` given by a forward and adjoint.

    Parameters
    ----------
    in_dim, out_dim : int
        Domain and codomain dimensions.
    forward : callable
        Maps a length-``in_dim`` vector to a length-``out_dim`` vector.
    adjoint : callable
        Maps a length-``out_dim`` vector to a length-``in_dim`` vector.  It
        must be the true transpose of ``forward``; :func:`dot_test` checks it.
    name : str, optional
        Label used in reprs and error messages.
    """

    __slots__ = ("_in_dim", "_out_dim", "_forward", "_adjoint", "_name")

    def __init__(self, in_dim: int, out_dim: int, forward: VectorMap,
                 adjoint: VectorMap, name: str | None = None):
        in_dim, out_dim = int(in_dim), int(out_dim)
        if in_dim < 1 or out_dim < 1:
            raise ValueError(f"operator dimensions must be positive, got {out_dim}x{in_dim}")
        object.__setattr__(self, "_in_dim", in_dim)
        object.__setattr__(self, "_out_dim", out_dim)
        object.__setattr__(self, "_forward", forward)
        object.__setattr__(self, "_adjoint", adjoint)
        object.__setattr__(self, "_name", name or "LinearOperator")

    def __setattr__(self, key, value):
        raise AttributeError("LinearOperator is immutable")

    @property
    def in_dim(self) -> int:
        return self._in_dim

    @property
    def out_dim(self) -> int:
        return self._out_dim

    @property
    def shape(self) -> tuple[int, int]:
        return (self._out_dim, self._in_dim)

    @property
    def name(self) -> str:
        return self._name

    def forward(self, x) -> np.ndarray:
        x = _as_vector(x, self._in_dim, self._name, "forward")
        return _as_vector(self._forward(x), self._out_dim, self._name, "forward output")

    def adjoint(self, y) -> np.ndarray:
        y = _as_vector(y, self._out_dim, self._name, "adjoint")
        return _as_vector(self._adjoint(y), self._in_dim, self._name, "adjoint output")

    __call__ = forward

    @property
    def T(self) -> "LinearOperator":
        """The adjoint viewed as an operator in its own right."""
        return LinearOperator(self._out_dim, self._in_dim, self._adjoint, self._forward,
                              name=f"{self._name}.T")

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return compose(self, other)
        return self.forward(other)

    def __mul__(self, alpha):
        if not np.isscalar(alpha):
            return NotImplemented
        a = float(alpha)
        return LinearOperator(self._in_dim, self._out_dim,
                              lambda x: a * self._forward(x),
                              lambda y: a * self._adjoint(y),
                              name=f"{a!r}*{self._name}")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other: "LinearOperator"):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self._name} {self.shape} and {other._name} {other.shape}")
        return LinearOperator(self._in_dim, self._out_dim,
                              lambda x: self._forward(x) + other._forward(x),
                              lambda y: self._adjoint(y) + other._adjoint(y),
                              name=f"({self._name} + {other._name})")

    def __sub__(self, other: "LinearOperator"):
        return self + (-other)

    def __repr__(self):
        return f"<{self._name}: {self._out_dim}x{self._in_dim}>"


def _as_vector(v, n: int, name: str, where: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"{name} {where}: expected vector of length {n}, got shape {v.shape}")
    return v


def identity(n: int) -> LinearOperator:
    return LinearOperator(n, n, lambda x: x.copy(), lambda y: y.copy(), name=f"Identity({n})")


def matrix_operator(m, name: str | None = None) -> LinearOperator:
    """Wrap a dense 2-D array as an operator (adjoint is the transpose)."""
    m = np.array(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    m.setflags(write=False)
    return LinearOperator(m.shape[1], m.shape[0], lambda x: m @ x, lambda y: m.T @ y,
                          name=name or f"Matrix{m.shape}")


def compose(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    """Return ``a o b``: forward ``x -> a(b(x))``, adjoint ``y -> b*(a*(y))``."""
    if b.out_dim != a.in_dim:
        raise ValueError(
            f"cannot compose {a.name} (in_dim={a.in_dim}) after {b.name} (out_dim={b.out_dim})")
    return LinearOperator(b.in_dim, a.out_dim,
                          lambda x: a.forward(b.forward(x)),
                          lambda y: b.adjoint(a.adjoint(y)),
                          name=f"{a.name}@{b.name}")


def to_dense(op: LinearOperator) -> np.ndarray:
    """Materialize ``op`` column by column: column j is ``op(e_j)``."""
    out = np.empty((op.out_dim, op.in_dim))
    e = np.zeros(op.in_dim)
    for j in range(op.in_dim):
        e[j] = 1.0
        out[:, j] = op.forward(e)
        e[j] = 0.0
    return out


def dense_pinv(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``(M^T M)^{-1} M^T`` of a full-column-rank matrix.

    Solved through a Cholesky factorization of the normal equations; the
    oracle matrices this is used on are tiny and well conditioned.

    Raises
    ------
    numpy.linalg.LinAlgError
        If ``m`` is (numerically) rank deficient.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    gram = m.T @ m
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("dense_pinv: matrix is rank deficient") from exc
    d = np.abs(np.diag(chol))
    if d.min() <= np.sqrt(gram.shape[0] * np.finfo(float).eps) * d.max():
        raise np.linalg.LinAlgError("dense_pinv: matrix is numerically rank deficient")
    z = np.linalg.solve(chol, m.T)
    return np.linalg.solve(chol.T, z)


def dot_test(op: LinearOperator, trials: int = 10, rng_seed: int = 0) -> float:
    """Largest relative adjoint mismatch over random standard-normal pairs.

    Returns ``max |<op x, y> - <x, op* y>| / (|x| |y| + eps)``; exactly 0 for
    operators whose adjoint is computed by the same arithmetic as the forward.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    eps = np.finfo(float).tiny
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(op.in_dim)
        y = rng.standard_normal(op.out_dim)
        lhs = float(np.dot(op.forward(x), y))
        rhs = float(np.dot(x, op.adjoint(y)))
        scale = np.linalg.norm(x) * np.linalg.norm(y) + eps
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst
