"""Seeded synthetic test images.

Every generator puts the strongest structure in the green channel — matching
the premise that the sensor's doubled green sampling makes that channel the
most informative — while red and blue carry correlated but weaker content.
"""

from __future__ import annotations

import numpy as np

from .image import Image

__all__ = ["synthetic_corpus"]


def _coords(size: int) -> tuple[np.ndarray, np.ndarray]:
    ax = np.arange(size, dtype=np.float64)
    rr, cc = np.meshgrid(ax, ax, indexing="ij")
    denom = max(size - 1, 1)
    return rr / denom, cc / denom


def _gradient(size: int, rng: np.random.Generator) -> np.ndarray:
    rr, cc = _coords(size)
    a, b = rng.uniform(0.5, 2.0, size=2)
    phase = rng.uniform(0.0, 2 * np.pi, size=3)
    g = 128.0 + 110.0 * np.sin(2 * np.pi * (a * rr + b * cc) + phase[0])
    r = 110.0 + 55.0 * np.cos(2 * np.pi * b * cc + phase[1])
    bl = 100.0 + 45.0 * np.sin(2 * np.pi * a * rr + phase[2])
    return np.stack([r, g, bl])


def _checker(size: int, rng: np.random.Generator) -> np.ndarray:
    rr, cc = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    gb = int(rng.integers(6, 13))
    rb = gb * 2
    g = np.where(((rr // gb) + (cc // gb)) % 2 == 0, 200.0, 55.0)
    r = np.where(((rr // rb) + (cc // rb)) % 2 == 0, 150.0, 85.0)
    b = 70.0 + 50.0 * cc / max(size - 1, 1)
    return np.stack([r, g, b.astype(np.float64)])


def _strokes(size: int, rng: np.random.Generator) -> np.ndarray:
    g = np.full((size, size), 55.0)
    for _ in range(14):
        p0 = rng.uniform(0, size - 1, size=2)
        p1 = rng.uniform(0, size - 1, size=2)
        value = rng.uniform(170.0, 250.0)
        steps = int(np.hypot(*(p1 - p0))) * 2 + 2
        for t in np.linspace(0.0, 1.0, steps):
            y, x = (1 - t) * p0 + t * p1
            y0, x0 = int(round(y)), int(round(x))
            g[max(0, y0 - 1) : y0 + 2, max(0, x0 - 1) : x0 + 2] = value
    r = 0.5 * g + 25.0
    b = 0.3 * g + 35.0
    return np.stack([r, g, b])


def _blobs(size: int, rng: np.random.Generator) -> np.ndarray:
    rr, cc = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")

    def field(n_bumps: int, amp: float, base: float) -> np.ndarray:
        out = np.full((size, size), base)
        for _ in range(n_bumps):
            cy, cx = rng.uniform(0, size, size=2)
            s = rng.uniform(size / 16, size / 5)
            out = out + amp * np.exp(-((rr - cy) ** 2 + (cc - cx) ** 2) / (2 * s * s))
        return out

    g = field(6, 120.0, 60.0)
    r = field(5, 55.0, 80.0)
    b = field(5, 40.0, 70.0)
    return np.stack([r, g, b])


def _mosaic(size: int, rng: np.random.Generator) -> np.ndarray:
    block = 16
    n = (size + block - 1) // block
    g = rng.uniform(20.0, 235.0, size=(n, n))
    r = rng.uniform(85.0, 170.0, size=(n, n))
    b = rng.uniform(75.0, 160.0, size=(n, n))
    planes = np.stack([r, g, b])
    planes = np.repeat(np.repeat(planes, block, axis=1), block, axis=2)
    return planes[:, :size, :size]


_KINDS = (
    ("gradient", _gradient),
    ("checker", _checker),
    ("strokes", _strokes),
    ("blobs", _blobs),
    ("mosaic", _mosaic),
)


def synthetic_corpus(
    n: int = 5, size: int = 256, seed: int = 0
) -> list[tuple[str, Image]]:
    """n deterministic green-rich RGB images of side `size`, as (name, image)."""
    if n < 1:
        raise ValueError(f"corpus size must be >= 1, got {n}")
    if size < 16:
        raise ValueError(f"image side must be >= 16, got {size}")
    out = []
    for i in range(n):
        kind, make = _KINDS[i % len(_KINDS)]
        rng = np.random.default_rng([seed, i])
        planes = np.clip(make(size, rng), 0.0, 255.0)
        out.append((f"{kind}_{i:02d}", Image.from_planes(planes)))
    return out
