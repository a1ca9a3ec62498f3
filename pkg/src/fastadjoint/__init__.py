"""Matrix-free linear operators with exact adjoints for wavelet frames,
signal extensions and convolutions, plus the first-order solvers that use them.
"""
from .conv import blur_op, conv_full, gaussian_psf, xcorr_valid
from .dwt import (WaveletCoeffs, WaveletCoeffs2D, analyze, analyze2d, synthesis2d_operator,
                  synthesis_operator, synthesize, synthesize2d)
from .extend import ExtensionKind, ExtensionSpec, extend, extend_pinv, extend_pinv_adjoint
from .filters import FilterBank, get_filter_bank
from .linop import LinearOperator, compose, dense_pinv, dot_test, to_dense
from .metrics import nnz_fraction, rel_err, ssim
from .problems import BceProblem, DeblurProblem, bce_solve, deblur_solve, synthetic_chart
from .solvers import SolveReport, SolverConfig, fista, opnorm_estimate, prox_grad_multiblock

__version__ = "0.1.0"

__all__ = [
    "LinearOperator", "compose", "dense_pinv", "dot_test", "to_dense",
    "ExtensionKind", "ExtensionSpec", "extend", "extend_pinv", "extend_pinv_adjoint",
    "FilterBank", "get_filter_bank",
    "WaveletCoeffs", "WaveletCoeffs2D", "analyze", "synthesize", "analyze2d", "synthesize2d",
    "synthesis_operator", "synthesis2d_operator",
    "blur_op", "conv_full", "gaussian_psf", "xcorr_valid",
    "nnz_fraction", "rel_err", "ssim",
    "SolveReport", "SolverConfig", "fista", "opnorm_estimate", "prox_grad_multiblock",
    "BceProblem", "DeblurProblem", "bce_solve", "deblur_solve", "synthetic_chart",
]
