"""First-order solvers: power iteration, FISTA and monotone proximal gradient.

Callbacks follow one convention throughout: ``prox(v, step)`` returns the
prox of ``step * g`` at ``v``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linop import LinearOperator

__all__ = [
    "SolverConfig",
    "SolveReport",
    "SolverError",
    "opnorm_estimate",
    "fista",
    "prox_grad_multiblock",
]


class SolverError(RuntimeError):
    """Raised when an iteration produces non-finite values or cannot make a step."""


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budget and step-size policy.

    ``tol`` stops a run when the relative objective change over the last
    ``window`` iterations drops below it; the default 0 runs the full
    ``max_iters`` budget.  ``step_growth > 1`` lets backtracking try a longer
    step at the start of every iteration.
    """

    max_iters: int = 500
    step: float | None = None
    backtracking: bool = False
    shrink: float = 0.5
    sufficient_decrease: float = 0.5
    step_growth: float = 1.0
    max_backtracks: int = 60
    tol: float = 0.0
    window: int = 10
    rng_seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if self.record_every < 1 or self.window < 1:
            raise ValueError("record_every and window must be >= 1")
        if self.step_growth < 1.0:
            raise ValueError("step_growth must be >= 1")


@dataclass
class SolveReport:
    objective_trace: list
    final_point: object
    iterations_run: int
    wall_time: float
    stop_reason: str
    history: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1][1]


def opnorm_estimate(op: LinearOperator, iters: int = 100, seed: int = 0) -> float:
    """Largest singular value of ``op`` by power iteration on ``op* op``.

    The estimate never exceeds the true value and does not decrease with
    ``iters``.  Returns 0 for the zero operator.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.in_dim)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = op.adjoint(op.forward(v))
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return math.sqrt(lam)


def _finite(name: str, value, k: int):
    if not np.all(np.isfinite(value)):
        raise SolverError(f"non-finite {name} at iteration {k}")
    return value


def _stalled_window(values: list, tol: float, window: int) -> bool:
    if tol <= 0 or len(values) <= window:
        return False
    old, new = values[-1 - window], values[-1]
    return abs(new - old) <= tol * max(abs(old), np.finfo(float).tiny)


def fista(grad_f: Callable, prox_g: Callable, x0, lipschitz: float | None,
          cfg: SolverConfig = SolverConfig(), *, objective: Callable | None = None,
          smooth: Callable | None = None, callback: Callable | None = None,
          momentum: bool = True) -> SolveReport:
    """Accelerated proximal gradient (FISTA) with constant or backtracked step.

    Parameters
    ----------
    grad_f : callable
        Gradient of the smooth term.
    prox_g : callable
        ``prox_g(v, step)``, the prox of ``step * g``.
    x0 : ndarray
        Starting point.
    lipschitz : float or None
        Lipschitz constant of ``grad_f``; the step is ``1/lipschitz``.  May be
        None when ``cfg.backtracking`` is set (then ``smooth`` is required).
    objective : callable, optional
        Full objective ``f + g``, recorded every ``cfg.record_every``
        iterations.  Without it the trace records iterate changes instead.
    smooth : callable, optional
        Smooth part ``f``; needed for backtracking.
    callback : callable, optional
        ``callback(k, x) -> dict`` evaluated at record points; the dicts are
        collected in ``SolveReport.history``.
    momentum : bool
        False gives plain ISTA with the same arithmetic.
    """
    if cfg.backtracking:
        if smooth is None:
            raise ValueError("backtracking needs the smooth objective")
        lip = float(lipschitz) if lipschitz else (1.0 / cfg.step if cfg.step else 1.0)
    else:
        if not lipschitz or not lipschitz > 0:
            raise ValueError("fista needs lipschitz > 0 or backtracking")
        lip = float(lipschitz)

    t0 = time.perf_counter()
    x = np.array(x0, dtype=np.float64)
    y = x.copy()
    t = 1.0
    trace, history, recent = [], [], []
    stop = "max_iters"

    def record(k, xk, change):
        if objective is not None:
            val = float(_finite("objective", objective(xk), k))
        else:
            val = float(change)
        trace.append((k, val))
        if callback is not None:
            history.append({"iteration": k, **callback(k, xk)})

    record(0, x, 0.0)
    k = 0
    for k in range(1, cfg.max_iters + 1):
        g = _finite("gradient", grad_f(y), k)
        if cfg.backtracking:
            fy = smooth(y)
            for _ in range(cfg.max_backtracks):
                step = 1.0 / lip
                x_new = prox_g(y - step * g, step)
                d = x_new - y
                if smooth(x_new) <= fy + np.vdot(g, d) + 0.5 * lip * np.vdot(d, d):
                    break
                lip /= cfg.shrink
            else:
                raise SolverError(f"backtracking failed at iteration {k}")
        else:
            step = 1.0 / lip
            x_new = prox_g(y - step * g, step)
        x_new = _finite("iterate", x_new, k)
        if momentum:
            t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            y = x_new + ((t - 1.0) / t_new) * (x_new - x)
            t = t_new
        else:
            y = x_new
        change = float(np.linalg.norm(x_new - x))
        x = x_new
        if cfg.tol > 0 and objective is not None:
            recent.append(float(objective(x)))
        if k % cfg.record_every == 0 or k == cfg.max_iters:
            record(k, x, change)
        if _stalled_window(recent, cfg.tol, cfg.window):
            stop = "tol"
            if trace[-1][0] != k:
                record(k, x, change)
            break
    return SolveReport(trace, x, k, time.perf_counter() - t0, stop, history)


Block = Sequence  # (grad, prox, x0[, penalty])


def prox_grad_multiblock(blocks: Sequence[Block], coupled_objective: Callable,
                         cfg: SolverConfig = SolverConfig(), *,
                         callback: Callable | None = None) -> SolveReport:
    """Monotone proximal gradient on several coupled variable blocks.

    Each block is ``(grad, prox, x0)`` or ``(grad, prox, x0, penalty)``:
    ``grad(xs)`` is the partial gradient of the smooth coupled objective with
    respect to that block given the list ``xs`` of all blocks, ``prox(v,
    step)`` handles the block's nonsmooth term and ``penalty(x)`` its value
    (used only for the recorded objective).  A single step size is shared by
    all blocks and chosen by backtracking until::

        f(x+) <= f(x) + <grad f(x), x+ - x> + c/step * ||x+ - x||^2

    with ``c = cfg.sufficient_decrease`` (1/2 is the usual quadratic upper
    bound).  With ``c <= 1/2`` this forces ``f + g`` to decrease, so the
    recorded objective is nonincreasing.  The run stops early when a step no
    longer moves the iterate (e.g. at a stationary starting point).
    """
    if not blocks:
        raise ValueError("need at least one block")
    grads = [b[0] for b in blocks]
    proxes = [b[1] for b in blocks]
    penalties = [b[3] if len(b) > 3 and b[3] is not None else None for b in blocks]
    xs = [np.array(b[2], dtype=np.float64) for b in blocks]
    c = cfg.sufficient_decrease
    step = cfg.step if cfg.step is not None else 1.0

    def total(f_val, pts):
        return f_val + sum(p(x) for p, x in zip(penalties, pts) if p is not None)

    t0 = time.perf_counter()
    f = float(_finite("objective", coupled_objective(xs), 0))
    obj = total(f, xs)
    trace = [(0, obj)]
    history = [{"iteration": 0, **callback(0, xs)}] if callback else []
    values = [obj]
    stop = "max_iters"
    k = 0
    for k in range(1, cfg.max_iters + 1):
        gs = [_finite("gradient", g(xs), k) for g in grads]
        step *= cfg.step_growth
        for _ in range(cfg.max_backtracks):
            cand = [p(x - step * g, step) for p, x, g in zip(proxes, xs, gs)]
            ds = [xn - x for xn, x in zip(cand, xs)]
            dd = sum(float(np.vdot(d, d)) for d in ds)
            if dd == 0.0:
                break
            lin = sum(float(np.vdot(g, d)) for g, d in zip(gs, ds))
            f_new = float(coupled_objective(cand))
            if np.isfinite(f_new) and f_new <= f + lin + (c / step) * dd:
                break
            step *= cfg.shrink
        else:
            raise SolverError(f"backtracking failed after {cfg.max_backtracks} reductions "
                              f"at iteration {k}")
        if dd == 0.0:
            stop = "stalled"
            k -= 1
            break
        obj_new = total(f_new, cand)
        if obj_new > obj:
            # decrease guaranteed in exact arithmetic; only roundoff lands here
            stop = "stalled"
            k -= 1
            break
        xs, f, obj = cand, f_new, obj_new
        values.append(obj)
        if k % cfg.record_every == 0 or k == cfg.max_iters:
            trace.append((k, obj))
            if callback:
                history.append({"iteration": k, **callback(k, xs)})
        if _stalled_window(values, cfg.tol, cfg.window):
            stop = "tol"
            if trace[-1][0] != k:
                trace.append((k, obj))
            break
    return SolveReport(trace, xs, max(k, 0), time.perf_counter() - t0, stop, history,
                       metrics={"final_step": step})
