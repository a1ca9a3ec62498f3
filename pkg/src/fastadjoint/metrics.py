"""Reconstruction quality metrics: relative error, sparsity and SSIM."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["rel_err", "nnz_fraction", "SsimParams", "ssim", "ssim_map", "NNZ_THRESHOLD"]

NNZ_THRESHOLD = 1e-12


def rel_err(estimate, reference) -> float:
    """``||estimate - reference||_2 / ||reference||_2``."""
    estimate = np.asarray(estimate, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if estimate.shape != reference.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {reference.shape}")
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise ValueError("reference has zero norm")
    return float(np.linalg.norm(estimate - reference) / ref_norm)


def nnz_fraction(coeffs, threshold: float = NNZ_THRESHOLD) -> float:
    """Fraction of coefficients with magnitude above ``threshold``."""
    v = coeffs.to_vector() if hasattr(coeffs, "to_vector") else np.asarray(coeffs).ravel()
    if v.size == 0:
        raise ValueError("no coefficients")
    return float(np.count_nonzero(np.abs(v) > threshold) / v.size)


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("SSIM window side must be a positive odd integer")
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError("SSIM constants k1, k2 must be positive")


def _gauss_window(p: SsimParams) -> np.ndarray:
    r = np.arange(p.window) - p.window // 2
    g = np.exp(-r ** 2 / (2.0 * p.sigma ** 2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable 'valid' weighted average; the window is symmetric
    n = g.size
    rows = sum(g[i] * img[i:img.shape[0] - n + 1 + i, :] for i in range(n))
    return sum(g[i] * rows[:, i:rows.shape[1] - n + 1 + i] for i in range(n))


def ssim_map(a, b, params: SsimParams = SsimParams()) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"SSIM needs two images of equal 2-D shape, got {a.shape}, {b.shape}")
    if min(a.shape) < params.window:
        raise ValueError(f"image side {min(a.shape)} smaller than SSIM window {params.window}")
    g = _gauss_window(params)
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    mu_a, mu_b = _filter_valid(a, g), _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a ** 2
    var_b = _filter_valid(b * b, g) - mu_b ** 2
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b, params: SsimParams = SsimParams()) -> float:
    """Mean structural similarity with a Gaussian-weighted window (``valid`` region)."""
    return float(np.mean(ssim_map(a, b, params)))
