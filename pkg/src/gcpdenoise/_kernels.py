"""Pure numpy implementations of the hot kernels.

Shared contract with the numba twins in _kernels_numba:

search_members(planes, rows, cols, frames, ps, window, k, lam, scheme_code)
    planes  (N_f, 4, H, W) float64: R, G, B and the per-pixel channel mean.
    rows/cols/frames (n,) int64 reference top-left positions.
    scheme_code: 0 green-guided, 1 green-only, 2 opponent-mean, 3 full-RGB.
    Returns (members, counts): members (n, k, 3) int64 rows of
    (frame, row, col), counts (n,) int64. Member 0 is the reference itself;
    the rest sort by (squared distance, frame, row, col) with earlier
    candidates winning ties; unused slots hold -1.

scatter_add(num, den, members, counts, patches)
    Accumulates patches (n, k, 3, ps, ps) into num (N_f, 3, H, W) and unit
    weights into den (N_f, H, W), in member order.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def search_members(planes, rows, cols, frames, ps, window, k, lam, scheme_code):
    nf, _, h, w = planes.shape
    n = rows.shape[0]
    members = np.full((n, k, 3), -1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    hi, wi = h - ps, w - ps
    half_lo = window // 2
    half_hi = (window - 1) // 2
    lam2 = lam * lam
    views = sliding_window_view(planes, (ps, ps), axis=(2, 3))
    for i in range(n):
        r, c, fr = int(rows[i]), int(cols[i]), int(frames[i])
        r0, r1 = max(0, r - half_lo), min(hi, r + half_hi)
        c0, c1 = max(0, c - half_lo), min(wi, c + half_hi)
        if scheme_code == 0:
            rp = planes[fr, :3, r : r + ps, c : c + ps]
            green = (rp[1] ** 2).sum()
            other = max((rp[0] ** 2).sum(), (rp[2] ** 2).sum())
            plane = 1 if green >= lam2 * other else 3
        elif scheme_code == 1:
            plane = 1
        elif scheme_code == 2:
            plane = 3
        else:
            plane = -1
        if plane >= 0:
            refp = views[fr, plane, r, c]
            block = views[:, plane, r0 : r1 + 1, c0 : c1 + 1]
            d = ((block - refp) ** 2).sum(axis=(-1, -2))
        else:
            refp = views[fr, :3, r, c]
            block = views[:, :3, r0 : r1 + 1, c0 : c1 + 1]
            d = ((block - refp[None, :, None, None]) ** 2).sum(axis=(1, -1, -2))
        nrw, ncw = d.shape[1], d.shape[2]
        total = nf * nrw * ncw
        self_idx = (fr * nrw + (r - r0)) * ncw + (c - c0)
        others = np.delete(d.reshape(-1), self_idx)
        count = min(k, total)
        counts[i] = count
        members[i, 0] = (fr, r, c)
        if count > 1:
            sel = np.argsort(others, kind="stable")[: count - 1]
            orig = np.where(sel >= self_idx, sel + 1, sel)
            f_idx, rem = np.divmod(orig, nrw * ncw)
            rr, cc = np.divmod(rem, ncw)
            members[i, 1:count, 0] = f_idx
            members[i, 1:count, 1] = rr + r0
            members[i, 1:count, 2] = cc + c0
    return members, counts


def scatter_add(num, den, members, counts, patches):
    n, _, _, ps, _ = patches.shape
    for i in range(n):
        for j in range(int(counts[i])):
            f, r, c = members[i, j]
            num[f, :, r : r + ps, c : c + ps] += patches[i, j]
            den[f, r : r + ps, c : c + ps] += 1.0
