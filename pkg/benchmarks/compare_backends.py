#!/usr/bin/env python3
"""Compare the compiled and pure-numpy kernel backends.

Times the two hot kernels (patch search, patch aggregation) in isolation and
the full denoising pipeline end to end. The compiled path is warmed up first
so JIT compilation never lands inside a timed region.

Usage: python3 benchmarks/compare_backends.py [--size 256] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gcpdenoise import _backend
from gcpdenoise.corpus import synthetic_corpus
from gcpdenoise.denoise import denoise_image
from gcpdenoise.image import DenoiseConfig, add_awgn
from gcpdenoise.search import SearchScheme, search_planes
from gcpdenoise.search import _SCHEME_CODES  # kernel-level scheme encoding


def _best_of(repeats: int, fn) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=256, help="image side (default 256)")
    ap.add_argument("--repeats", type=int, default=3, help="timing repeats (default 3)")
    args = ap.parse_args()

    clean = synthetic_corpus(n=1, size=args.size, seed=0)[0][1]
    noisy = add_awgn(clean, 25.0, seed=1)
    cfg = DenoiseConfig(sigma=25.0)

    planes = search_planes(noisy)
    h, w = noisy.height, noisy.width
    rng = np.random.default_rng(2)
    n_refs = 2000
    rows = rng.integers(0, h - cfg.ps + 1, n_refs).astype(np.int64)
    cols = rng.integers(0, w - cfg.ps + 1, n_refs).astype(np.int64)
    frames = np.zeros(n_refs, dtype=np.int64)
    search_args = (planes, rows, cols, frames, cfg.ps, cfg.window, cfg.k, 0.8,
                   _SCHEME_CODES[SearchScheme.GREEN_GUIDED])

    members = np.stack(
        [
            np.zeros((n_refs, cfg.k), dtype=np.int64),
            rng.integers(0, h - cfg.ps + 1, (n_refs, cfg.k)),
            rng.integers(0, w - cfg.ps + 1, (n_refs, cfg.k)),
        ],
        axis=-1,
    ).astype(np.int64)
    counts = np.full(n_refs, cfg.k, dtype=np.int64)
    patches = rng.normal(size=(n_refs, cfg.k, 3, cfg.ps, cfg.ps))

    results: dict[str, dict[str, float]] = {}
    for name in ("numpy", "numba"):
        try:
            _backend.set_backend(name)
        except ImportError:
            print(f"{name}: unavailable, skipping")
            continue
        kern = _backend.kernels()
        kern.search_members(*search_args)  # warm-up (JIT compile on first call)
        num = np.zeros((1, 3, h, w))
        den = np.zeros((1, h, w))
        kern.scatter_add(num, den, members[:8], counts[:8], patches[:8])
        denoise_image(noisy, DenoiseConfig(sigma=25.0, stride=64))

        results[name] = {
            "search": _best_of(args.repeats, lambda: kern.search_members(*search_args)),
            "scatter": _best_of(
                args.repeats,
                lambda: kern.scatter_add(
                    np.zeros((1, 3, h, w)), np.zeros((1, h, w)), members, counts, patches
                ),
            ),
            "end-to-end": _best_of(args.repeats, lambda: denoise_image(noisy, cfg)),
        }

    header = f"{'stage':<12}" + "".join(f"{n:>12}" for n in results)
    if "numpy" in results and "numba" in results:
        header += f"{'speedup':>10}"
    print(f"\nimage {args.size}x{args.size}, {n_refs} search refs, K={cfg.k}, "
          f"window={cfg.window}, best of {args.repeats}\n")
    print(header)
    for stage in ("search", "scatter", "end-to-end"):
        line = f"{stage:<12}" + "".join(
            f"{results[n][stage]:>11.3f}s" for n in results
        )
        if "numpy" in results and "numba" in results:
            line += f"{results['numpy'][stage] / results['numba'][stage]:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
