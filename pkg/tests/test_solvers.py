import numpy as np
import pytest

from fastadjoint.linop import identity, matrix_operator
from fastadjoint.regularizers import soft_threshold
from fastadjoint.solvers import (SolverConfig, SolverError, fista, opnorm_estimate,
                                 prox_grad_multiblock)


def lasso(seed=0, m=20, n=8, lam=0.1):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((m, n)), rng.standard_normal(m)
    lip = np.linalg.norm(a, 2) ** 2
    f = lambda x: 0.5 * np.sum((a @ x - b) ** 2)
    obj = lambda x: f(x) + lam * np.abs(x).sum()
    grad = lambda x: a.T @ (a @ x - b)
    prox = lambda v, step: soft_threshold(v, lam * step)
    return a, b, lam, lip, f, obj, grad, prox


def ista_oracle(a, b, lam, iters):
    # plain proximal gradient, written out independently of the package
    step = 1.0 / np.linalg.norm(a, 2) ** 2
    x = np.zeros(a.shape[1])
    for _ in range(iters):
        v = x - step * a.T @ (a @ x - b)
        x = np.sign(v) * np.maximum(np.abs(v) - lam * step, 0)
    return x


def test_opnorm_examples():
    assert opnorm_estimate(identity(16)) == pytest.approx(1.0, abs=1e-12)
    d = matrix_operator(np.diag(np.arange(1.0, 6.0)))
    assert opnorm_estimate(d, 200) == pytest.approx(5.0, abs=1e-9)
    assert opnorm_estimate(matrix_operator(np.zeros((3, 3)))) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_opnorm_never_exceeds_true_norm(seed):
    m = np.random.default_rng(seed).standard_normal((12, 12))
    true = np.sqrt(np.linalg.eigvalsh(m.T @ m).max())
    for iters in (1, 5, 50):
        assert opnorm_estimate(matrix_operator(m), iters, seed) <= true + 1e-9


def test_fista_quadratic():
    c = np.arange(5.0)
    r = fista(lambda x: x - c, lambda v, s: v, np.zeros(5), 1.0, SolverConfig(max_iters=200),
              objective=lambda x: 0.5 * np.sum((x - c) ** 2))
    assert np.abs(r.final_point - c).max() <= 1e-8


def test_fista_lasso_zero_solution():
    a, b, _, lip, _, _, grad, _ = lasso()
    lam = np.abs(a.T @ b).max()
    r = fista(grad, lambda v, s: soft_threshold(v, lam * s), np.zeros(8), lip,
              SolverConfig(max_iters=100))
    np.testing.assert_array_equal(r.final_point, np.zeros(8))


def test_fista_matches_long_ista():
    a, b, lam, lip, _, obj, grad, prox = lasso()
    r = fista(grad, prox, np.zeros(8), lip, SolverConfig(max_iters=500), objective=obj)
    ref = obj(ista_oracle(a, b, lam, 50000))
    assert abs(r.final_objective - ref) <= 1e-6


def test_fista_objective_bounds():
    _, _, _, lip, _, obj, grad, prox = lasso(1)
    r = fista(grad, prox, np.zeros(8), lip, SolverConfig(max_iters=300), objective=obj)
    values = dict(r.objective_trace)
    assert all(values[k] <= values[1] for k in values if k >= 10)
    assert values[300] <= values[0]


def test_fista_without_momentum_is_ista():
    a, b, lam, lip, _, obj, grad, prox = lasso(2)
    r = fista(grad, prox, np.zeros(8), lip, SolverConfig(max_iters=50), momentum=False)
    np.testing.assert_allclose(r.final_point, ista_oracle(a, b, lam, 50), atol=1e-13)


def test_fista_backtracking_converges():
    a, b, lam, lip, f, obj, grad, prox = lasso(3)
    r = fista(grad, prox, np.zeros(8), None, SolverConfig(max_iters=2000, backtracking=True),
              objective=obj, smooth=f)
    ref = obj(ista_oracle(a, b, lam, 50000))
    assert abs(r.final_objective - ref) <= 1e-6


def test_fista_tolerance_and_callback():
    _, _, _, lip, _, obj, grad, prox = lasso(4)
    cfg = SolverConfig(max_iters=5000, tol=1e-12, record_every=7)
    r = fista(grad, prox, np.zeros(8), lip, cfg, objective=obj,
              callback=lambda k, x: {"norm": float(np.linalg.norm(x))})
    assert r.stop_reason == "tol" and r.iterations_run < 5000
    assert [h["iteration"] for h in r.history] == [k for k, _ in r.objective_trace]


def test_fista_is_deterministic():
    _, _, _, lip, _, obj, grad, prox = lasso(5)
    runs = [fista(grad, prox, np.zeros(8), lip, SolverConfig(max_iters=100), objective=obj)
            for _ in range(2)]
    assert runs[0].objective_trace == runs[1].objective_trace


def test_fista_rejects_bad_input():
    with pytest.raises(ValueError):
        fista(lambda x: x, lambda v, s: v, np.zeros(2), None)
    with pytest.raises(SolverError):
        fista(lambda x: np.full_like(x, np.nan), lambda v, s: v, np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


def test_single_block_matches_ista_trajectory():
    a, b, lam, lip, f, obj, grad, prox = lasso(6)
    cfg = SolverConfig(max_iters=60, step=1.0 / lip)
    traj_f, traj_m = [], []
    fista(grad, prox, np.zeros(8), lip, cfg, momentum=False,
          callback=lambda k, x: traj_f.append(x.copy()) or {})
    prox_grad_multiblock([(lambda xs: grad(xs[0]), prox, np.zeros(8),
                           lambda x: lam * np.abs(x).sum())],
                         lambda xs: f(xs[0]), cfg,
                         callback=lambda k, xs: traj_m.append(xs[0].copy()) or {})
    n = min(len(traj_f), len(traj_m))
    assert n > 20
    for xf, xm in zip(traj_f[:n], traj_m[:n]):
        assert np.abs(xf - xm).max() <= 1e-10


def test_bilinear_toy():
    blocks = [(lambda xs: xs[1] * (xs[0] * xs[1] - 1), lambda v, s: v, np.array([2.0])),
              (lambda xs: xs[0] * (xs[0] * xs[1] - 1), lambda v, s: v, np.array([2.0]))]
    r = prox_grad_multiblock(blocks, lambda xs: 0.5 * float((xs[0] * xs[1] - 1)[0] ** 2),
                             SolverConfig(max_iters=500))
    values = [v for _, v in r.objective_trace]
    first = values[:10]
    assert all(b < a for a, b in zip(first, first[1:]))
    assert all(b <= a for a, b in zip(values, values[1:]))
    h, s = r.final_point
    assert abs(h[0] * s[0] - 1) <= 1e-6


def test_stationary_start_returns_x0():
    x0 = np.array([1.0, -2.0])
    r = prox_grad_multiblock([(lambda xs: np.zeros(2), lambda v, s: v, x0)],
                             lambda xs: 0.0, SolverConfig(max_iters=10))
    np.testing.assert_array_equal(r.final_point[0], x0)
    assert r.stop_reason == "stalled" and r.iterations_run == 0


def test_multiblock_backtracking_failure():
    # steep kink at 0 with a misleading gradient: no step passes the decrease test
    blocks = [(lambda xs: np.ones(1), lambda v, s: v, np.zeros(1))]
    with pytest.raises(SolverError):
        prox_grad_multiblock(blocks, lambda xs: 1e6 * float(abs(xs[0][0])),
                             SolverConfig(max_iters=3, max_backtracks=5))
