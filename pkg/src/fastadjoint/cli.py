"""Command-line entry point: ``adjoint-check``, ``deblur`` and ``bce``.

Exit codes: 0 success, 1 usage or I/O error, 2 failed verification.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .conv import (blur_op, conv_full, conv_op_fixed_h, conv_op_fixed_s, gaussian_psf,
                   psf_from_array)
from .dwt import analysis2d_operator, analysis_operator, synthesis2d_operator, synthesis_operator
from .extend import ExtensionKind, ExtensionSpec, extension_operator, extension_pinv_operator
from .filters import get_filter_bank
from .linop import dot_test, to_dense
from .problems import (BceProblem, DeblurProblem, bce_solve, bce_synthesize_data,
                       deblur_solve, simulate_blurred, synthetic_chart)
from .regularizers import HuberSpec, diff_op
from .solvers import SolverConfig, SolverError

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2
WAVELETS = ("haar", "db2", "db4", "cdf97")
EXTENSIONS = tuple(k.value for k in ExtensionKind)
OPS = ("extension", "wavelet", "wavelet2d", "conv", "blur", "diff", "all")
DENSE_LIMIT = 1024  # skip the dense comparison beyond this many rows or columns


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _wavelet(text):
    try:
        return get_filter_bank(text).name
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _mode(text):
    modes = {"true": "true_adjoint", "true_adjoint": "true_adjoint",
             "pinv-approx": "pinv_approx", "pinv_approx": "pinv_approx"}
    if text not in modes:
        raise argparse.ArgumentTypeError("adjoint mode must be 'true' or 'pinv-approx'")
    return modes[text]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fastadjoint",
                description="Matrix-free wavelet/convolution adjoints and the solvers built on them.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("adjoint-check", help="dot tests and dense-transpose comparisons")
    a.add_argument("--op", choices=OPS, default="all")
    a.add_argument("--wavelet", type=_wavelet, action="append",
                   help="filter bank (repeatable; default: all)")
    a.add_argument("--ext", choices=EXTENSIONS, action="append",
                   help="extension kind (repeatable; default: all)")
    a.add_argument("--stages", type=_positive_int, default=3)
    a.add_argument("--n", type=_positive_int, default=64, help="1-D length / 2-D side")
    a.add_argument("--pad", type=_positive_int, default=3, help="pad width for --op extension")
    a.add_argument("--adjoint-mode", type=_mode, default="true_adjoint")
    a.add_argument("--trials", type=_positive_int, default=100)
    a.add_argument("--threshold", type=_positive_float, default=1e-9)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out-dir", type=Path, help="also write adjoint_check.json here")

    d = sub.add_parser("deblur", help="l1 synthesis deblurring with FISTA")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic-chart", nargs=2, type=_positive_int, metavar=("H", "W"),
                     help="blur and add noise to the built-in test chart")
    src.add_argument("--input", type=Path, help="observed (blurred) PGM image")
    d.add_argument("--truth", type=Path, help="reference PGM for error metrics with --input")
    d.add_argument("--psf-csv", type=Path, help="PSF kernel as a comma-separated matrix")
    d.add_argument("--psf-side", type=_positive_int, default=9)
    d.add_argument("--psf-sigma", type=_positive_float, default=2.0)
    d.add_argument("--noise", type=_nonneg_float, default=1e-3,
                   help="noise std for --synthetic-chart")
    d.add_argument("--bc", choices=EXTENSIONS, default="sym", help="blur boundary condition")
    d.add_argument("--lambda", dest="lam", type=_positive_float, default=2e-5)
    d.add_argument("--iters", type=_positive_int, default=2500)
    d.add_argument("--wavelet", type=_wavelet, default="haar")
    d.add_argument("--stages", type=_positive_int, default=3)
    d.add_argument("--ext", choices=EXTENSIONS, default="sym")
    d.add_argument("--adjoint-mode", type=_mode, default="true_adjoint")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--record-every", type=_positive_int, default=1)
    d.add_argument("--out-dir", type=Path, default=Path("."))
    d.add_argument("--prefix", default="deblur")

    b = sub.add_parser("bce", help="sparse blind multichannel deconvolution")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", nargs=5, metavar=("K", "N", "CH", "NOISE", "SEED"))
    src.add_argument("--observed", type=Path, nargs="+", help="one CSV per channel")
    b.add_argument("--k-est", type=_positive_int)
    b.add_argument("--n-est", type=_positive_int)
    b.add_argument("--lambda-h", type=_nonneg_float, default=0.1)
    b.add_argument("--lambda-s", type=_nonneg_float, default=0.01)
    b.add_argument("--lambda-tv", type=_nonneg_float, default=0.01)
    b.add_argument("--delta", type=_positive_float, default=0.1)
    b.add_argument("--sparsity", type=_positive_float, default=0.2)
    b.add_argument("--init", choices=("truth", "random"), default="random")
    b.add_argument("--perturb", type=_nonneg_float, default=0.01,
                   help="relative perturbation for --init truth")
    b.add_argument("--iters", type=_positive_int, default=2000)
    b.add_argument("--seed", type=int, default=0, help="seed for initialization")
    b.add_argument("--record-every", type=_positive_int, default=1)
    b.add_argument("--dry-run", action="store_true", help="validate inputs and exit")
    b.add_argument("--out-dir", type=Path, default=Path("."))
    return p


def _prepare_out_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {path}: {exc}") from None
    return path


# --------------------------------------------------------------------------
# adjoint-check


def _dense_gap(op) -> float | None:
    if op.in_dim > DENSE_LIMIT or op.out_dim > DENSE_LIMIT:
        return None
    fwd = to_dense(op)
    adj = to_dense(op.T)
    return float(np.abs(adj - fwd.T).max())


def _check_ops(args):
    n, rng = args.n, np.random.default_rng(args.seed)
    wavelets = args.wavelet or list(WAVELETS)
    exts = args.ext or list(EXTENSIONS)
    want = (lambda name: args.op in ("all", name))
    if want("extension"):
        for e in exts:
            spec = ExtensionSpec(ExtensionKind(e), args.pad)
            yield f"E[{e},pad={args.pad}]", extension_operator(spec, n)
            yield f"Epinv[{e},pad={args.pad}]", extension_pinv_operator(spec, n)
    if want("wavelet"):
        for w in wavelets:
            for e in exts:
                tag = f"{w},{e},J={args.stages}"
                yield f"W[{tag}]", synthesis_operator(w, e, args.stages, n, args.adjoint_mode)
                yield f"Wpinv[{tag}]", analysis_operator(w, e, args.stages, n)
    if want("wavelet2d"):
        for w in wavelets:
            for e in exts:
                tag = f"{w},{e},J={args.stages}"
                shape = (n, n)
                yield f"W2d[{tag}]", synthesis2d_operator(w, e, args.stages, shape,
                                                          args.adjoint_mode)
                yield f"Wpinv2d[{tag}]", analysis2d_operator(w, e, args.stages, shape)
    if want("conv"):
        k = max(1, n // 4)
        yield f"ConvS[K={k},N={n}]", conv_op_fixed_s(rng.standard_normal(n), k)
        yield f"ConvH[K={k},N={n}]", conv_op_fixed_h(rng.standard_normal(k), n)
    if want("blur"):
        for e in exts:
            side = min(9, n - 1 if n % 2 == 0 else n)
            yield f"R[{e},{side}x{side}]", blur_op(gaussian_psf(max(1, side), 2.0), n, n, e)
    if want("diff") and n >= 2:
        yield f"D[{n}]", diff_op(n)


def cmd_adjoint_check(args) -> int:
    if args.out_dir is not None:
        _prepare_out_dir(args.out_dir)
    results, worst = [], 0.0
    for name, op in _check_ops(args):
        dot = dot_test(op, trials=args.trials, rng_seed=args.seed)
        dense = _dense_gap(op) if args.n <= 64 else None
        worst = max(worst, dot, dense or 0.0)
        results.append({"operator": name, "shape": list(op.shape), "dot_test": dot,
                        "dense_gap": dense,
                        "ok": dot <= args.threshold and (dense is None or dense <= args.threshold)})
    ok = all(r["ok"] for r in results)
    report = {"command": "adjoint-check", "adjoint_mode": args.adjoint_mode,
              "threshold": args.threshold, "trials": args.trials, "n": args.n,
              "stages": args.stages, "max_discrepancy": worst, "passed": ok,
              "operators": results}
    text = json.dumps(io._jsonable({"schema": io.SCHEMA_VERSION, **report}),
                      sort_keys=True, indent=2)
    print(text)
    if args.out_dir is not None:
        io.write_json(args.out_dir / "adjoint_check.json", report)
    if not ok:
        print(f"adjoint-check: {sum(not r['ok'] for r in results)} operator(s) exceed "
              f"threshold {args.threshold:g} (max {worst:.3g})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# deblur


def _load_psf(args):
    if args.psf_csv is None:
        if args.psf_side % 2 == 0:
            raise UsageError("--psf-side must be odd")
        return gaussian_psf(args.psf_side, args.psf_sigma)
    try:
        k = np.loadtxt(args.psf_csv, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read PSF {args.psf_csv}: {exc}") from None
    return psf_from_array(k)


def cmd_deblur(args) -> int:
    for path in (args.input, args.truth, args.psf_csv):
        if path is not None and not path.is_file():
            raise UsageError(f"no such file: {path}")
    out = _prepare_out_dir(args.out_dir)
    psf = _load_psf(args)
    if args.synthetic_chart:
        h, w = args.synthetic_chart
        truth = synthetic_chart(h, w)
        blur = blur_op(psf, h, w, args.bc)
        observed = simulate_blurred(truth, blur, args.noise, args.seed)
    else:
        try:
            observed = io.read_pgm(args.input)
            truth = io.read_pgm(args.truth) if args.truth else None
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        if truth is not None and truth.shape != observed.shape:
            raise UsageError(f"truth shape {truth.shape} differs from input {observed.shape}")
        blur = blur_op(psf, *observed.shape, args.bc)

    problem = DeblurProblem(blur, observed, args.lam, args.wavelet, args.stages, args.ext,
                            args.adjoint_mode)
    cfg = SolverConfig(max_iters=args.iters, record_every=args.record_every,
                       rng_seed=args.seed)
    report = deblur_solve(problem, cfg, truth=truth)

    rows = []
    for (k, obj), hist in zip(report.objective_trace, report.history):
        rows.append([k, obj, hist.get("rel_err"), hist.get("ssim"), hist["nnz_fraction"]])
    io.write_table_csv(out / f"{args.prefix}_trace.csv",
                       ["iteration", "objective", "rel_err", "ssim", "nnz_fraction"], rows)
    lo, hi = io.write_pgm(out / f"{args.prefix}.pgm", report.metrics["image"])
    m = report.metrics
    summary = {
        "command": "deblur",
        "config": {"wavelet": args.wavelet, "stages": args.stages, "ext": args.ext,
                   "bc": args.bc, "lambda": args.lam, "iters": args.iters,
                   "adjoint_mode": args.adjoint_mode, "seed": args.seed,
                   "psf": {"shape": list(psf.kernel.shape), "sigma": psf.sigma},
                   "noise": args.noise if args.synthetic_chart else None,
                   "shape": list(observed.shape)},
        "iterations_run": report.iterations_run,
        "stop_reason": report.stop_reason,
        "final_objective": report.final_objective,
        "lipschitz": m["lipschitz"],
        "nnz_fraction": m["nnz_fraction"],
        "rel_err": m.get("rel_err"),
        "ssim": m.get("ssim"),
        "output_min": lo,
        "output_max": hi,
    }
    io.write_json(out / f"{args.prefix}.json", summary)
    print(json.dumps(io._jsonable(summary), sort_keys=True))
    return EXIT_OK


# --------------------------------------------------------------------------
# bce


def _perturb(v, rel, rng):
    g = rng.standard_normal(v.size)
    norm_g = np.linalg.norm(g)
    return v + rel * np.linalg.norm(v) * g / norm_g if norm_g > 0 else v.copy()


def cmd_bce(args) -> int:
    truth = None
    if args.synthetic:
        try:
            k, n, ch = (int(v) for v in args.synthetic[:3])
            noise, seed = float(args.synthetic[3]), int(args.synthetic[4])
        except ValueError:
            raise UsageError("--synthetic expects K N CH NOISE SEED") from None
        if k < 2 or n < 2 or ch < 1 or noise < 0:
            raise UsageError("--synthetic needs K, N >= 2, CH >= 1 and NOISE >= 0")
        hs, s, xs = bce_synthesize_data(k, n, ch, min(args.sparsity, 1.0), noise, seed)
        truth = (hs, s)
        k_est = args.k_est or k
        n_est = args.n_est or (k + n - 1 - k_est + 1)
    else:
        for path in args.observed:
            if not path.is_file():
                raise UsageError(f"no such file: {path}")
        try:
            xs = [io.read_signal_csv(p) for p in args.observed]
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        if len({x.size for x in xs}) != 1:
            raise UsageError("observed channels have inconsistent lengths: "
                             + ", ".join(str(x.size) for x in xs))
        if args.k_est is None:
            raise UsageError("--k-est is required with --observed")
        k_est = args.k_est
        n_est = args.n_est or (xs[0].size - k_est + 1)
    if k_est + n_est - 1 != xs[0].size:
        raise UsageError(f"K_est + N_est - 1 = {k_est + n_est - 1} but observed length "
                         f"is {xs[0].size}")
    if args.init == "truth":
        if truth is None:
            raise UsageError("--init truth needs --synthetic data")
        if len(truth[0][0]) != k_est or len(truth[1]) != n_est:
            raise UsageError("--init truth needs K_est = K and N_est = N")
    out = _prepare_out_dir(args.out_dir)
    problem = BceProblem(xs, k_est, n_est, args.lambda_h, args.lambda_s, args.lambda_tv,
                         HuberSpec(args.delta))
    if args.dry_run:
        print(json.dumps({"command": "bce", "dry_run": True, "k_est": k_est, "n_est": n_est,
                          "channels": problem.channels, "observed_length": xs[0].size},
                         sort_keys=True))
        return EXIT_OK

    if args.init == "truth":
        rng = np.random.default_rng(args.seed)
        init = ([_perturb(h, args.perturb, rng) for h in truth[0]],
                _perturb(truth[1], args.perturb, rng))
    else:
        init = args.seed
    cfg = SolverConfig(max_iters=args.iters, backtracking=True,
                       record_every=args.record_every, rng_seed=args.seed)
    report = bce_solve(problem, init, cfg, truth=truth)
    hs_est, s_est = report.final_point
    for i, h in enumerate(hs_est):
        io.write_signal_csv(out / f"h{i}.csv", h)
        io.write_signal_csv(out / f"fit{i}.csv", conv_full(h, s_est))
    io.write_signal_csv(out / "s.csv", s_est)
    io.write_table_csv(out / "bce_trace.csv", ["iteration", "objective"], report.objective_trace)
    m = report.metrics
    summary = {
        "command": "bce",
        "config": {"k_est": k_est, "n_est": n_est, "channels": problem.channels,
                   "lambda_h": args.lambda_h, "lambda_s": args.lambda_s,
                   "lambda_tv": args.lambda_tv, "delta": args.delta, "init": args.init,
                   "perturb": args.perturb if args.init == "truth" else None,
                   "iters": args.iters, "seed": args.seed,
                   "synthetic": list(args.synthetic) if args.synthetic else None},
        "iterations_run": report.iterations_run,
        "stop_reason": report.stop_reason,
        "initial_objective": report.objective_trace[0][1],
        "final_objective": report.final_objective,
        "final_step": m["final_step"],
        "misfit": m["misfit"],
        "noise_floor": m.get("noise_floor"),
        "h_alignment": m.get("h_alignment"),
        "s_alignment": m.get("s_alignment"),
    }
    io.write_json(out / "bce.json", summary)
    print(json.dumps(io._jsonable(summary), sort_keys=True))
    return EXIT_OK


COMMANDS = {"adjoint-check": cmd_adjoint_check, "deblur": cmd_deblur, "bce": cmd_bce}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"fastadjoint {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"fastadjoint {args.command}: solver failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
