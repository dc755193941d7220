"""Core image/video types and pixel-level operations.

Images are stored planar channel-major, shape (C, H, W) float64, so
per-channel scans (norms, distances) run over contiguous memory. Values live
on the [0, 255] scale but are not clamped; synthesis and filtering stay in
float, quantization happens only at I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Image",
    "VideoSequence",
    "PatchRef",
    "RGGBGroup",
    "DenoiseConfig",
    "extract_patch",
    "rgb_to_rggb",
    "rggb_to_rgb",
    "build_group",
    "add_awgn",
    "add_awgn_channels",
    "quantize",
]


@dataclass(frozen=True)
class Image:
    """A single image: read-only float64 planes of shape (C, H, W)."""

    planes: np.ndarray

    def __post_init__(self) -> None:
        planes = np.ascontiguousarray(self.planes, dtype=np.float64)
        if planes.ndim != 3:
            raise ValueError(f"expected (C, H, W) planes, got shape {planes.shape}")
        c, h, w = planes.shape
        if c not in (1, 3, 4):
            raise ValueError(f"unsupported channel count {c} (expected 1, 3 or 4)")
        if h < 1 or w < 1:
            raise ValueError(f"image dimensions must be >= 1, got {h}x{w}")
        if not np.all(np.isfinite(planes)):
            raise ValueError("image samples must be finite")
        if planes is self.planes:
            planes = planes.copy()
        planes.flags.writeable = False
        object.__setattr__(self, "planes", planes)

    @classmethod
    def from_planes(cls, planes: np.ndarray) -> "Image":
        return cls(planes=np.asarray(planes))

    @classmethod
    def from_interleaved(cls, raster: np.ndarray) -> "Image":
        """Build from an (H, W, C) raster."""
        raster = np.asarray(raster, dtype=np.float64)
        if raster.ndim != 3:
            raise ValueError(f"expected (H, W, C) raster, got shape {raster.shape}")
        return cls(planes=raster.transpose(2, 0, 1))

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def interleaved(self) -> np.ndarray:
        """Return an (H, W, C) copy."""
        return np.ascontiguousarray(self.planes.transpose(1, 2, 0))


@dataclass(frozen=True)
class VideoSequence:
    """An ordered sequence of frames with identical geometry."""

    frames: tuple[Image, ...]

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("a video needs at least one frame")
        shape = frames[0].planes.shape
        for i, frame in enumerate(frames):
            if frame.planes.shape != shape:
                raise ValueError(
                    f"frame {i} has shape {frame.planes.shape}, expected {shape}"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def channels(self) -> int:
        return self.frames[0].channels

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def width(self) -> int:
        return self.frames[0].width

    def stacked_planes(self) -> np.ndarray:
        """Return all frames as one (N_f, C, H, W) array."""
        return np.stack([f.planes for f in self.frames])


@dataclass(frozen=True, order=True)
class PatchRef:
    """Top-left corner of a patch: (row, col) in a given frame."""

    row: int
    col: int
    frame: int = 0

    def __post_init__(self) -> None:
        if self.row < 0 or self.col < 0 or self.frame < 0:
            raise ValueError(f"patch indices must be non-negative, got {self}")


@dataclass(frozen=True)
class DenoiseConfig:
    """Tunables for grouping, transform learning and thresholding.

    window is the side of the square search window of candidate top-left
    positions centered on the reference (20 for stills, 16 is the customary
    video setting); frames is the sequence length used by the video threshold
    rule and is ignored when video is False.
    """

    sigma: float
    ps: int = 8
    window: int = 20
    k: int = 30
    green_lambda: float = 0.8
    tau_scale: float = 1.1
    stride: int = 4
    video: bool = False
    frames: int = 1

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.ps < 2:
            raise ValueError(f"patch size must be >= 2, got {self.ps}")
        if self.window < self.ps:
            raise ValueError(
                f"search window ({self.window}) must be >= patch size ({self.ps})"
            )
        if self.k < 1:
            raise ValueError(f"group size must be >= 1, got {self.k}")
        if self.green_lambda <= 0:
            raise ValueError(f"lambda must be > 0, got {self.green_lambda}")
        if self.tau_scale < 0:
            raise ValueError(f"tau scale must be >= 0, got {self.tau_scale}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.frames < 1:
            raise ValueError(f"frame count must be >= 1, got {self.frames}")


@dataclass(frozen=True)
class RGGBGroup:
    """A stack of K RGGB patches, shape (ps, ps, 4, K), plus their locations."""

    data: np.ndarray
    members: tuple[PatchRef, ...]

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        members = tuple(self.members)
        if data.ndim != 4 or data.shape[2] != 4:
            raise ValueError(f"expected (ps, ps, 4, K) group data, got {data.shape}")
        if data.shape[3] != len(members) or not members:
            raise ValueError(
                f"group of {data.shape[3]} patches needs as many members, "
                f"got {len(members)}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("group samples must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "members", members)

    @property
    def ps(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[3]


def _frame_planes(source: Image | VideoSequence, frame: int) -> np.ndarray:
    if isinstance(source, VideoSequence):
        if frame >= source.n_frames:
            raise ValueError(
                f"frame {frame} out of range for {source.n_frames}-frame video"
            )
        return source.frames[frame].planes
    if frame != 0:
        raise ValueError(f"frame must be 0 for a still image, got {frame}")
    return source.planes


def extract_patch(
    source: Image | VideoSequence, ref: PatchRef, ps: int
) -> np.ndarray:
    """Copy the ps x ps patch at ref as a (ps, ps, C) array."""
    planes = _frame_planes(source, ref.frame)
    _, h, w = planes.shape
    if ref.row + ps > h or ref.col + ps > w:
        raise ValueError(
            f"patch {ps}x{ps} at ({ref.row}, {ref.col}) exceeds {h}x{w} image"
        )
    block = planes[:, ref.row : ref.row + ps, ref.col : ref.col + ps]
    return np.ascontiguousarray(block.transpose(1, 2, 0))


def rgb_to_rggb(patch: np.ndarray) -> np.ndarray:
    """Lift a (ps, ps, 3) RGB patch to (ps, ps, 4) RGGB fibers.

    The green plane is duplicated into channels 1 and 2, mirroring the double
    green sampling rate of the Bayer RGGB block.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim != 3 or patch.shape[2] != 3:
        raise ValueError(f"expected (ps, ps, 3) patch, got shape {patch.shape}")
    return np.stack(
        (patch[..., 0], patch[..., 1], patch[..., 1], patch[..., 2]), axis=-1
    )


def rggb_to_rgb(patch: np.ndarray) -> np.ndarray:
    """Collapse (ps, ps, 4) RGGB fibers back to (ps, ps, 3) RGB.

    The two green channels are averaged; they may differ after filtering.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim != 3 or patch.shape[2] != 4:
        raise ValueError(f"expected (ps, ps, 4) patch, got shape {patch.shape}")
    green = 0.5 * (patch[..., 1] + patch[..., 2])
    return np.stack((patch[..., 0], green, patch[..., 3]), axis=-1)


def build_group(
    source: Image | VideoSequence, members: tuple[PatchRef, ...], ps: int
) -> RGGBGroup:
    """Gather the member patches and lift each to RGGB."""
    members = tuple(members)
    data = np.empty((ps, ps, 4, len(members)))
    for i, ref in enumerate(members):
        data[..., i] = rgb_to_rggb(extract_patch(source, ref, ps))
    return RGGBGroup(data=data, members=members)


def add_awgn(img: Image, sigma: float, seed: int) -> Image:
    """Add i.i.d. zero-mean Gaussian noise of std sigma (not clamped)."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img
    rng = np.random.default_rng(seed)
    return Image(planes=img.planes + rng.normal(0.0, sigma, size=img.planes.shape))


def add_awgn_channels(
    img: Image, sigmas: tuple[float, ...], seed: int
) -> Image:
    """Add Gaussian noise with a separate std per channel."""
    sigmas = tuple(float(s) for s in sigmas)
    if len(sigmas) != img.channels:
        raise ValueError(
            f"need {img.channels} sigmas for a {img.channels}-channel image, "
            f"got {len(sigmas)}"
        )
    if any(s < 0 for s in sigmas):
        raise ValueError(f"sigmas must be >= 0, got {sigmas}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, 1.0, size=img.planes.shape)
    noise *= np.asarray(sigmas)[:, None, None]
    return Image(planes=img.planes + noise)


def quantize(img: Image) -> np.ndarray:
    """Quantize to an 8-bit (H, W, C) raster: round half up, clamp to [0, 255]."""
    # floor(x + 0.5) rounds halves up for every sign, unlike numpy's
    # bankers rounding.
    q = np.floor(img.planes + 0.5)
    np.clip(q, 0.0, 255.0, out=q)
    return q.transpose(1, 2, 0).astype(np.uint8)
