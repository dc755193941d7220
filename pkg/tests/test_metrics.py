"""Fidelity metrics: peak signal-to-noise ratio, structural similarity, and
per-channel signal-to-noise.

Oracles:
- PSNR values recomputed from 10*log10(peak^2 / mse) with math.log10.
- SSIM checked against a literal nested-loop reference implementation with
  an explicitly constructed 11x11 Gaussian window (sigma 1.5).
- The doubled-sampling advantage: halving a channel's noise level must raise
  its SNR by 20*log10(2) ~ 6.02 dB.
"""

import math

import numpy as np
import pytest

from gcpdenoise.image import Image, add_awgn_channels
from gcpdenoise.metrics import (
    MetricsReport,
    compute_metrics,
    psnr,
    snr_per_channel,
    ssim,
)


# ---------------------------------------------------------------------------
# PSNR
# ---------------------------------------------------------------------------


def test_psnr_unit_error():
    a = np.zeros((16, 16))
    b = np.ones((16, 16))
    assert psnr(a, b) == pytest.approx(20 * math.log10(255.0), rel=1e-12)
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-3)


def test_psnr_identical_is_infinite():
    a = np.full((8, 8, 3), 7.0)
    assert math.isinf(psnr(a, a))


def test_psnr_known_mse():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 255, (32, 32, 3))
    noise = rng.normal(0, 10, a.shape)
    mse = float(np.mean(noise**2))
    assert psnr(a, a + noise) == pytest.approx(
        10 * math.log10(255.0**2 / mse), rel=1e-12
    )


def test_psnr_doubling_error_costs_six_db():
    a = np.zeros((16, 16))
    e = np.ones((16, 16))
    assert psnr(a, a + e) - psnr(a, a + 2 * e) == pytest.approx(
        20 * math.log10(2.0), rel=1e-12
    )


def test_psnr_custom_peak():
    a = np.zeros((8, 8))
    b = np.ones((8, 8))
    assert psnr(a, b, peak=1.0) == pytest.approx(0.0, abs=1e-12)


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_psnr_symmetric():
    rng = np.random.default_rng(1)
    a = rng.uniform(0, 255, (16, 16))
    b = rng.uniform(0, 255, (16, 16))
    assert psnr(a, b) == psnr(b, a)


# ---------------------------------------------------------------------------
# SSIM
# ---------------------------------------------------------------------------


def _gaussian_window():
    g = np.empty((11, 11))
    for i in range(11):
        for j in range(11):
            g[i, j] = math.exp(-((i - 5) ** 2 + (j - 5) ** 2) / (2 * 1.5**2))
    return g / g.sum()


def _ssim_oracle_gray(a, b, peak=255.0):
    """Literal windowed-statistics SSIM over the fully-covered region."""
    w = _gaussian_window()
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    h, wd = a.shape
    vals = []
    for i in range(h - 10):
        for j in range(wd - 10):
            x = a[i : i + 11, j : j + 11]
            y = b[i : i + 11, j : j + 11]
            mx = (w * x).sum()
            my = (w * y).sum()
            vx = (w * x * x).sum() - mx * mx
            vy = (w * y * y).sum() - my * my
            cxy = (w * x * y).sum() - mx * my
            vals.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return float(np.mean(vals))


def test_ssim_identical_is_one():
    rng = np.random.default_rng(2)
    a = rng.uniform(0, 255, (24, 24))
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_ssim_matches_nested_loop_oracle_gray():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 255, (24, 20))
    b = np.clip(a + rng.normal(0, 20, a.shape), 0, 255)
    assert ssim(a, b) == pytest.approx(_ssim_oracle_gray(a, b), abs=1e-6)


def test_ssim_matches_oracle_structured_content():
    rr, cc = np.meshgrid(np.arange(26), np.arange(22), indexing="ij")
    a = 100.0 + 50.0 * np.sin(rr / 3.0) + 30.0 * np.cos(cc / 2.0)
    rng = np.random.default_rng(4)
    b = a + rng.normal(0, 12, a.shape)
    assert ssim(a, b) == pytest.approx(_ssim_oracle_gray(a, b), abs=1e-6)


def test_ssim_color_is_channel_mean():
    rng = np.random.default_rng(5)
    a = rng.uniform(0, 255, (20, 20, 3))
    b = np.clip(a + rng.normal(0, 15, a.shape), 0, 255)
    per_channel = [ssim(a[:, :, c], b[:, :, c]) for c in range(3)]
    assert ssim(a, b) == pytest.approx(float(np.mean(per_channel)), rel=1e-12)


def test_ssim_symmetric():
    rng = np.random.default_rng(6)
    a = rng.uniform(0, 255, (20, 20))
    b = rng.uniform(0, 255, (20, 20))
    assert ssim(a, b) == pytest.approx(ssim(b, a), rel=1e-12)


def test_ssim_decreases_with_noise():
    rng = np.random.default_rng(7)
    rr, cc = np.meshgrid(np.arange(48), np.arange(48), indexing="ij")
    a = 120.0 + 60.0 * np.sin(rr / 4.0) * np.cos(cc / 5.0)
    light = a + rng.normal(0, 5, a.shape)
    heavy = a + rng.normal(0, 40, a.shape)
    assert ssim(a, heavy) < ssim(a, light) < 1.0


def test_ssim_bounded_above_by_one():
    rng = np.random.default_rng(8)
    a = rng.uniform(0, 255, (20, 20))
    b = rng.uniform(0, 255, (20, 20))
    assert ssim(a, b) <= 1.0 + 1e-12


def test_ssim_rejects_small_images():
    with pytest.raises(ValueError):
        ssim(np.zeros((10, 16)), np.zeros((10, 16)))


def test_ssim_shape_mismatch():
    with pytest.raises(ValueError):
        ssim(np.zeros((16, 16)), np.zeros((16, 17)))


# ---------------------------------------------------------------------------
# per-channel SNR
# ---------------------------------------------------------------------------


def test_snr_per_channel_half_noise_gains_six_db():
    # Equal signal power in all channels; the green channel gets half the
    # noise level, as a sensor with doubled green sampling would after
    # averaging its two green samples.
    rng = np.random.default_rng(9)
    base = rng.uniform(30, 220, (128, 128))
    clean = Image.from_planes(np.stack([base, base, base]))
    noisy = add_awgn_channels(clean, (30.0, 15.0, 30.0), seed=10)
    snr_r, snr_g, snr_b = snr_per_channel(clean, noisy)
    assert snr_g - snr_r == pytest.approx(20 * math.log10(2.0), abs=0.15)
    assert snr_g - snr_b == pytest.approx(20 * math.log10(2.0), abs=0.15)
    assert snr_g > snr_r


def test_snr_per_channel_exact_value():
    clean = Image.from_planes(np.full((3, 16, 16), 100.0))
    planes = clean.planes.copy()
    planes[0] += 10.0  # constant offset noise in red only
    noisy = Image.from_planes(planes)
    snr_r, snr_g, snr_b = snr_per_channel(clean, noisy)
    assert snr_r == pytest.approx(10 * math.log10(100.0**2 / 10.0**2), rel=1e-12)
    assert math.isinf(snr_g) and math.isinf(snr_b)


def test_snr_per_channel_geometry_mismatch():
    a = Image.from_planes(np.zeros((3, 8, 8)))
    b = Image.from_planes(np.zeros((3, 8, 9)))
    with pytest.raises(ValueError):
        snr_per_channel(a, b)


# ---------------------------------------------------------------------------
# compute_metrics
# ---------------------------------------------------------------------------


def test_compute_metrics_report_fields():
    rng = np.random.default_rng(11)
    clean = Image.from_planes(rng.uniform(0, 255, (3, 24, 24)))
    noisy = Image.from_planes(
        np.clip(clean.planes + rng.normal(0, 20, clean.planes.shape), 0, 255)
    )
    rep = compute_metrics(clean, noisy)
    assert isinstance(rep, MetricsReport)
    assert rep.psnr == pytest.approx(psnr(clean.interleaved(), noisy.interleaved()))
    assert rep.ssim == pytest.approx(ssim(clean.interleaved(), noisy.interleaved()))
    assert not rep.psnr_infinite


def test_compute_metrics_identical_flags_infinite():
    img = Image.from_planes(np.full((3, 16, 16), 50.0))
    rep = compute_metrics(img, img)
    assert rep.psnr_infinite
    assert math.isinf(rep.psnr)
    assert rep.ssim == pytest.approx(1.0)


def test_compute_metrics_quantized():
    rng = np.random.default_rng(12)
    clean = Image.from_planes(rng.integers(0, 256, (3, 24, 24)).astype(np.float64))
    test = Image.from_planes(clean.planes + 0.3)  # under half a code step
    plain = compute_metrics(clean, test)
    quant = compute_metrics(clean, test, quantize=True)
    # On an integer-valued reference, rounding both sides erases the error.
    assert quant.psnr_infinite and not plain.psnr_infinite
    assert quant.ssim == pytest.approx(1.0)


def test_compute_metrics_geometry_mismatch():
    a = Image.from_planes(np.zeros((3, 16, 16)))
    b = Image.from_planes(np.zeros((3, 16, 18)))
    with pytest.raises(ValueError):
        compute_metrics(a, b)
