"""Fidelity metrics for the benchmark harness.

psnr and ssim operate on plain float arrays (grayscale (H, W) or interleaved
(H, W, C)); snr_per_channel and compute_metrics take Image objects. All
metrics default to the 8-bit peak of 255.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .image import Image
from .image import quantize as _quantize_to_uint8

__all__ = [
    "MetricsReport",
    "psnr",
    "ssim",
    "snr_per_channel",
    "compute_metrics",
]

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


def _paired(a: np.ndarray, b: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"{what}: shapes differ, {a.shape} vs {b.shape}")
    return a, b


def psnr(ref: np.ndarray, test: np.ndarray, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; infinite when the arrays match."""
    ref, test = _paired(ref, test, "psnr")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gaussian_window(size: int = _SSIM_WINDOW, sigma: float = _SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    ax = np.arange(size) - half
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def _ssim_plane(x: np.ndarray, y: np.ndarray, peak: float) -> float:
    w = _gaussian_window()
    c1 = (_SSIM_K1 * peak) ** 2
    c2 = (_SSIM_K2 * peak) ** 2
    mx = fftconvolve(x, w, mode="valid")
    my = fftconvolve(y, w, mode="valid")
    vx = fftconvolve(x * x, w, mode="valid") - mx * mx
    vy = fftconvolve(y * y, w, mode="valid") - my * my
    cxy = fftconvolve(x * y, w, mode="valid") - mx * my
    s = ((2 * mx * my + c1) * (2 * cxy + c2)) / (
        (mx * mx + my * my + c1) * (vx + vy + c2)
    )
    return float(s.mean())


def ssim(ref: np.ndarray, test: np.ndarray, peak: float = 255.0) -> float:
    """Mean structural similarity over the fully-covered window region.

    Uses the customary 11x11 Gaussian window with sigma 1.5 and stability
    constants (0.01*peak)^2 and (0.03*peak)^2. Color inputs (H, W, C) score
    each channel separately and average.
    """
    ref, test = _paired(ref, test, "ssim")
    if ref.ndim not in (2, 3):
        raise ValueError(f"ssim: expected (H, W) or (H, W, C), got {ref.shape}")
    if ref.shape[0] < _SSIM_WINDOW or ref.shape[1] < _SSIM_WINDOW:
        raise ValueError(
            f"ssim: image {ref.shape[0]}x{ref.shape[1]} is smaller than the "
            f"{_SSIM_WINDOW}x{_SSIM_WINDOW} window"
        )
    if ref.ndim == 2:
        return _ssim_plane(ref, test, peak)
    return float(
        np.mean([_ssim_plane(ref[:, :, c], test[:, :, c], peak) for c in range(ref.shape[2])])
    )


def snr_per_channel(clean: Image, noisy: Image) -> tuple[float, ...]:
    """Per-channel SNR in dB: 10*log10(signal power / residual power)."""
    if clean.planes.shape != noisy.planes.shape:
        raise ValueError(
            f"snr_per_channel: geometry differs, {clean.planes.shape} vs "
            f"{noisy.planes.shape}"
        )
    out = []
    for c in range(clean.channels):
        signal = float(np.mean(clean.planes[c] ** 2))
        noise = float(np.mean((noisy.planes[c] - clean.planes[c]) ** 2))
        out.append(math.inf if noise == 0.0 else 10.0 * math.log10(signal / noise))
    return tuple(out)


@dataclass(frozen=True)
class MetricsReport:
    """PSNR/SSIM pair for one image comparison."""

    psnr: float
    ssim: float

    @property
    def psnr_infinite(self) -> bool:
        return math.isinf(self.psnr)


def compute_metrics(clean: Image, test: Image, quantize: bool = False) -> MetricsReport:
    """Score test against clean; optionally quantize both to 8-bit first."""
    if clean.planes.shape != test.planes.shape:
        raise ValueError(
            f"compute_metrics: geometry differs, {clean.planes.shape} vs "
            f"{test.planes.shape}"
        )
    if quantize:
        a = _quantize_to_uint8(clean).astype(np.float64)
        b = _quantize_to_uint8(test).astype(np.float64)
    else:
        a = clean.interleaved()
        b = test.interleaved()
    return MetricsReport(psnr=psnr(a, b), ssim=ssim(a, b))
