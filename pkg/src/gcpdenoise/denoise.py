"""Collaborative denoising: group similar patches, project each group onto
its learned bases, hard-threshold the coefficients, invert, and average the
overlapping patch estimates back into the frame.

The whole frame is processed in batches: references are drawn from a stride
grid, searched in one kernel call, and groups of equal size are transformed
together through the stacked einsum engine so the per-group cost is a few
batched 8x8/KxK eigendecompositions instead of Python-loop work.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._backend import kernels
from .image import DenoiseConfig, Image, RGGBGroup, VideoSequence
from .search import _SCHEME_CODES, SearchScheme, reference_grid
from .tsvd import (
    CoeffGroup,
    _fft4,
    _forward_stacked,
    _group_pca_stacked,
    _inverse_stacked,
    _slice_bases_stacked,
    build_transform,
    forward_transform,
    inverse_transform,
)

__all__ = [
    "threshold_value",
    "hard_threshold",
    "denoise_group",
    "denoise_image",
    "denoise_video",
]

_CHUNK = 256  # groups transformed per batch; bounds peak working memory


def threshold_value(
    ps: int, k: int, sigma: float, tau_scale: float, n_frames: int = 1
) -> float:
    """Universal hard threshold for a group of k patches of side ps.

    tau = tau_scale * sigma * sqrt(2 * ln(3 * ps^2 * k * n_frames)) with the
    natural logarithm; the count is the number of coefficients that describe
    the group (3 independent channel samples per pixel, k patches, and for
    video the group pool spans n_frames frames).
    """
    if ps < 1:
        raise ValueError(f"patch size must be >= 1, got {ps}")
    if k < 1:
        raise ValueError(f"group size must be >= 1, got {k}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if tau_scale < 0:
        raise ValueError(f"tau scale must be >= 0, got {tau_scale}")
    if n_frames < 1:
        raise ValueError(f"frame count must be >= 1, got {n_frames}")
    return tau_scale * sigma * math.sqrt(2.0 * math.log(3.0 * ps * ps * k * n_frames))


def hard_threshold(coeffs: np.ndarray, tau: float) -> tuple[np.ndarray, int]:
    """Zero every coefficient with |value| < tau (the boundary survives).

    Returns the thresholded copy and the number of retained coefficients.
    """
    if tau < 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    coeffs = np.asarray(coeffs, dtype=np.float64)
    mask = np.abs(coeffs) >= tau
    return np.where(mask, coeffs, 0.0), int(mask.sum())


def denoise_group(g: RGGBGroup, cfg: DenoiseConfig) -> tuple[RGGBGroup, int]:
    """Filter one patch group; returns the estimate and the retained count."""
    t = build_transform(g)
    coeffs = forward_transform(g, t)
    tau = threshold_value(
        g.ps, g.k, cfg.sigma, cfg.tau_scale, cfg.frames if cfg.video else 1
    )
    data, retained = hard_threshold(coeffs.data, tau)
    est = inverse_transform(
        CoeffGroup(data=data, members=coeffs.members, retained_count=retained), t
    )
    return est, retained


def _denoise_planes(
    rgb: np.ndarray, cfg: DenoiseConfig, scheme: SearchScheme
) -> np.ndarray:
    """Denoise stacked frames (N_f, 3, H, W) -> same shape, float64."""
    nf, _, h, w = rgb.shape
    ps = cfg.ps
    grid = reference_grid(h, w, ps, cfg.stride)
    n_grid = grid.shape[0]
    rows = np.tile(grid[:, 0], nf)
    cols = np.tile(grid[:, 1], nf)
    frames = np.repeat(np.arange(nf, dtype=np.int64), n_grid)

    planes = np.concatenate([rgb, rgb.mean(axis=1, keepdims=True)], axis=1)
    planes = np.ascontiguousarray(planes)
    members, counts = kernels().search_members(
        planes,
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        frames,
        ps,
        cfg.window,
        cfg.k,
        cfg.green_lambda,
        _SCHEME_CODES[scheme],
    )

    views = sliding_window_view(rgb, (ps, ps), axis=(2, 3))
    num = np.zeros((nf, 3, h, w))
    den = np.zeros((nf, h, w))
    scatter = kernels().scatter_add

    # Groups of equal size share tensor shapes, so process them per size.
    for count in np.unique(counts):
        cnt = int(count)
        idx = np.flatnonzero(counts == count)
        tau = threshold_value(ps, cnt, cfg.sigma, cfg.tau_scale, nf)
        for lo in range(0, idx.size, _CHUNK):
            sel = idx[lo : lo + _CHUNK]
            m = members[sel, :cnt]
            f, r, c = m[..., 0], m[..., 1], m[..., 2]
            patches = views[f, :, r, c]  # (n, cnt, 3, ps, ps)
            # -> (n, ps, ps, 3, cnt), then duplicate green: R, G, G, B.
            x = np.moveaxis(patches, (1, 2, 3, 4), (4, 3, 1, 2))
            groups = np.ascontiguousarray(
                np.stack([x[:, :, :, 0], x[:, :, :, 1], x[:, :, :, 1], x[:, :, :, 2]], axis=3)
            )

            u_row, u_col = _slice_bases_stacked(_fft4(groups, axis=3))
            u_group = _group_pca_stacked(groups)
            coeffs = _forward_stacked(groups, u_row, u_col, u_group)
            coeffs = np.where(np.abs(coeffs) >= tau, coeffs, 0.0)
            est = _inverse_stacked(coeffs, u_row, u_col, u_group)

            # RGGB -> RGB (average the two green samples), back to patches.
            out = np.stack(
                [
                    est[:, :, :, 0],
                    0.5 * (est[:, :, :, 1] + est[:, :, :, 2]),
                    est[:, :, :, 3],
                ],
                axis=3,
            )  # (n, ps, ps, 3, cnt)
            out_patches = np.ascontiguousarray(
                np.moveaxis(out, (1, 2, 3, 4), (3, 4, 2, 1))
            )  # (n, cnt, 3, ps, ps)
            scatter(
                num,
                den,
                np.ascontiguousarray(m),
                np.full(sel.size, cnt, dtype=np.int64),
                out_patches,
            )

    return num / den[:, None, :, :]


def denoise_image(
    img: Image,
    cfg: DenoiseConfig,
    scheme: SearchScheme = SearchScheme.GREEN_GUIDED,
) -> Image:
    """Denoise an RGB image; returns unclamped float64 planes."""
    if img.channels != 3:
        raise ValueError(f"denoise_image needs an RGB image, got {img.channels} channels")
    out = _denoise_planes(img.planes[None], cfg, scheme)
    return Image.from_planes(out[0])


def denoise_video(
    video: VideoSequence,
    cfg: DenoiseConfig,
    scheme: SearchScheme = SearchScheme.GREEN_GUIDED,
) -> VideoSequence:
    """Denoise an RGB sequence; groups span all frames and the threshold
    grows with the frame count."""
    if video.channels != 3:
        raise ValueError(
            f"denoise_video needs RGB frames, got {video.channels} channels"
        )
    out = _denoise_planes(video.stacked_planes(), cfg, scheme)
    return VideoSequence(frames=tuple(Image.from_planes(p) for p in out))
