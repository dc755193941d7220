"""Nonlocal patch search guided by the green channel.

The green channel carries twice the Bayer sampling rate and therefore the
best signal-to-noise ratio of the three channels. Grouping compares patches
on the green plane whenever the reference patch is green-dominant and falls
back to the per-pixel channel mean otherwise; pure single-plane and full-RGB
comparisons are available for measurement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .image import DenoiseConfig, Image, PatchRef, VideoSequence

__all__ = [
    "SearchScheme",
    "Candidate",
    "reference_grid",
    "channel_dominance",
    "patch_distance",
    "find_similar",
    "find_similar_video",
    "success_rate",
]


class SearchScheme(enum.Enum):
    """Distance rule used to rank candidate patches."""

    GREEN_GUIDED = "green-guided"
    GREEN_ONLY = "green-only"
    OPPONENT_MEAN = "opponent-mean"
    FULL_RGB = "full-rgb"


_SCHEME_CODES = {
    SearchScheme.GREEN_GUIDED: 0,
    SearchScheme.GREEN_ONLY: 1,
    SearchScheme.OPPONENT_MEAN: 2,
    SearchScheme.FULL_RGB: 3,
}


@dataclass(frozen=True, order=True)
class Candidate:
    """A candidate patch with its distance to the reference."""

    distance: float
    ref: PatchRef


def reference_grid(height: int, width: int, ps: int, stride: int) -> np.ndarray:
    """Reference top-left positions as an (n, 2) array of (row, col).

    Rows and columns advance in stride steps, with the final position clamped
    to height-ps (width-ps) so the full border is covered. Strides larger
    than ps are capped at ps: every pixel must stay inside at least one
    reference footprint or aggregation would leave it unestimated.
    """
    if ps > height or ps > width:
        raise ValueError(f"patch size {ps} exceeds image {height}x{width}")
    step = min(stride, ps)
    rows = list(range(0, height - ps + 1, step))
    if rows[-1] != height - ps:
        rows.append(height - ps)
    cols = list(range(0, width - ps + 1, step))
    if cols[-1] != width - ps:
        cols.append(width - ps)
    return np.array([(r, c) for r in rows for c in cols], dtype=np.int64)


def channel_dominance(patch: np.ndarray, lam: float) -> bool:
    """True when ||G|| >= lam * max(||R||, ||B||) (Frobenius, inclusive)."""
    patch = _check_rgb_patch(patch, "channel_dominance")
    green = float((patch[..., 1] ** 2).sum())
    other = max(float((patch[..., 0] ** 2).sum()), float((patch[..., 2] ** 2).sum()))
    return green >= lam * lam * other


def patch_distance(
    a: np.ndarray,
    b: np.ndarray,
    scheme: SearchScheme,
    lam: float = 0.8,
) -> float:
    """Frobenius distance between two RGB patches under the given scheme.

    Green-guided resolves the dominance test on the first (reference) patch,
    then compares green planes or per-pixel means accordingly.
    """
    a = _check_rgb_patch(a, "patch_distance")
    b = _check_rgb_patch(b, "patch_distance")
    if a.shape != b.shape:
        raise ValueError(f"patch shapes differ: {a.shape} vs {b.shape}")
    if scheme == SearchScheme.GREEN_GUIDED:
        scheme = (
            SearchScheme.GREEN_ONLY
            if channel_dominance(a, lam)
            else SearchScheme.OPPONENT_MEAN
        )
    if scheme == SearchScheme.GREEN_ONLY:
        diff = a[..., 1] - b[..., 1]
    elif scheme == SearchScheme.OPPONENT_MEAN:
        diff = a.mean(axis=2) - b.mean(axis=2)
    else:
        diff = a - b
    return float(np.sqrt((diff * diff).sum()))


def _check_rgb_patch(patch: np.ndarray, what: str) -> np.ndarray:
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim != 3 or patch.shape[2] != 3:
        raise ValueError(f"{what}: expected a (ps, ps, 3) patch, got {patch.shape}")
    return patch


def search_planes(source: Image | VideoSequence) -> np.ndarray:
    """Stack the channels the kernels need: (N_f, 4, H, W) R, G, B, mean."""
    if isinstance(source, VideoSequence):
        rgb = source.stacked_planes()
    else:
        rgb = source.planes[None]
    if rgb.shape[1] != 3:
        raise ValueError(f"search needs 3-channel input, got {rgb.shape[1]} channels")
    mean = rgb.mean(axis=1, keepdims=True)
    return np.ascontiguousarray(np.concatenate([rgb, mean], axis=1))


def search_members_batch(
    planes: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    frames: np.ndarray,
    cfg: DenoiseConfig,
    scheme: SearchScheme,
) -> tuple[np.ndarray, np.ndarray]:
    """Kernel-backed batched search; see _kernels.search_members."""
    return kernels().search_members(
        planes,
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(frames, dtype=np.int64),
        cfg.ps,
        cfg.window,
        cfg.k,
        cfg.green_lambda,
        _SCHEME_CODES[scheme],
    )


def _check_ref(ref: PatchRef, nf: int, h: int, w: int, ps: int) -> None:
    if ref.frame >= nf:
        raise ValueError(f"reference frame {ref.frame} out of range ({nf} frames)")
    if ref.row > h - ps or ref.col > w - ps:
        raise ValueError(
            f"reference ({ref.row}, {ref.col}) leaves no room for a "
            f"{ps}x{ps} patch in a {h}x{w} image"
        )


def _members_to_refs(members: np.ndarray, count: int) -> list[PatchRef]:
    return [
        PatchRef(row=int(r), col=int(c), frame=int(f))
        for f, r, c in members[:count]
    ]


def find_similar(
    img: Image,
    ref: PatchRef,
    cfg: DenoiseConfig,
    scheme: SearchScheme = SearchScheme.GREEN_GUIDED,
) -> list[PatchRef]:
    """The min(K, candidate count) best-matching patches around ref.

    Candidates are every in-bounds top-left position in the window x window
    box centered on the reference top-left (rows ref.row - window//2 through
    ref.row + (window-1)//2, clamped, same for columns). The reference is
    always member 0; the rest sort by (distance, row, col).
    """
    planes = search_planes(img)
    _check_ref(ref, 1, img.height, img.width, cfg.ps)
    members, counts = search_members_batch(
        planes,
        np.array([ref.row]),
        np.array([ref.col]),
        np.array([ref.frame]),
        cfg,
        scheme,
    )
    return _members_to_refs(members[0], int(counts[0]))


def find_similar_video(
    video: VideoSequence,
    ref: PatchRef,
    cfg: DenoiseConfig,
    scheme: SearchScheme = SearchScheme.GREEN_GUIDED,
) -> list[PatchRef]:
    """find_similar across all frames: the same clamped spatial window is
    scanned in every frame; ties sort by (distance, frame, row, col)."""
    planes = search_planes(video)
    _check_ref(ref, video.n_frames, video.height, video.width, cfg.ps)
    members, counts = search_members_batch(
        planes,
        np.array([ref.row]),
        np.array([ref.col]),
        np.array([ref.frame]),
        cfg,
        scheme,
    )
    return _members_to_refs(members[0], int(counts[0]))


def success_rate(
    clean: Image,
    noisy: Image,
    cfg: DenoiseConfig,
    scheme: SearchScheme,
    n_refs: int,
    seed: int,
) -> float:
    """Mean overlap between noisy-search and clean-search member sets.

    Samples n_refs reference positions uniformly (rows drawn first, then
    columns, from numpy's default_rng(seed)), runs the scheme under test on
    the noisy image and full-RGB matching on the clean image with identical
    (K, window), and averages |intersection| / K.
    """
    if n_refs < 1:
        raise ValueError(f"n_refs must be >= 1, got {n_refs}")
    if (clean.height, clean.width) != (noisy.height, noisy.width):
        raise ValueError(
            f"clean {clean.height}x{clean.width} and noisy "
            f"{noisy.height}x{noisy.width} images differ in geometry"
        )
    ps = cfg.ps
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, clean.height - ps + 1, size=n_refs)
    cols = rng.integers(0, clean.width - ps + 1, size=n_refs)
    frames = np.zeros(n_refs, dtype=np.int64)
    noisy_members, counts = search_members_batch(
        search_planes(noisy), rows, cols, frames, cfg, scheme
    )
    clean_members, _ = search_members_batch(
        search_planes(clean), rows, cols, frames, cfg, SearchScheme.FULL_RGB
    )
    # Encode (frame, row, col) into one key per member for set intersection.
    h, w = clean.height, clean.width
    keys_noisy = (noisy_members[..., 0] * h + noisy_members[..., 1]) * w + noisy_members[..., 2]
    keys_clean = (clean_members[..., 0] * h + clean_members[..., 1]) * w + clean_members[..., 2]
    total = 0.0
    for i in range(n_refs):
        m = int(counts[i])
        overlap = np.intersect1d(keys_noisy[i, :m], keys_clean[i, :m]).size
        total += overlap / cfg.k
    return total / n_refs
