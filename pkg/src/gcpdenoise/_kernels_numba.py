"""Numba twins of the hot kernels; same contract as _kernels.

The search maintains a sorted top-(k-1) insertion buffer per reference.
Inserting after equal distances and replacing only on strictly smaller
distances reproduces exactly the stable-sort semantics of the numpy path.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def _search(planes, rows, cols, frames, ps, window, k, lam, scheme_code, members, counts):
    nf = planes.shape[0]
    h = planes.shape[2]
    w = planes.shape[3]
    hi = h - ps
    wi = w - ps
    half_lo = window // 2
    half_hi = (window - 1) // 2
    lam2 = lam * lam
    n = rows.shape[0]
    kk = k - 1
    for i in prange(n):
        r = rows[i]
        c = cols[i]
        fr = frames[i]
        r0 = max(0, r - half_lo)
        r1 = min(hi, r + half_hi)
        c0 = max(0, c - half_lo)
        c1 = min(wi, c + half_hi)
        plane = -1
        if scheme_code == 0:
            sr = 0.0
            sg = 0.0
            sb = 0.0
            for y in range(ps):
                for x in range(ps):
                    vr = planes[fr, 0, r + y, c + x]
                    vg = planes[fr, 1, r + y, c + x]
                    vb = planes[fr, 2, r + y, c + x]
                    sr += vr * vr
                    sg += vg * vg
                    sb += vb * vb
            other = sr if sr > sb else sb
            plane = 1 if sg >= lam2 * other else 3
        elif scheme_code == 1:
            plane = 1
        elif scheme_code == 2:
            plane = 3
        best_d = np.empty(kk + 1, np.float64)
        best_f = np.empty(kk + 1, np.int64)
        best_r = np.empty(kk + 1, np.int64)
        best_c = np.empty(kk + 1, np.int64)
        nbest = 0
        total = 0
        for f in range(nf):
            for rr in range(r0, r1 + 1):
                for cc in range(c0, c1 + 1):
                    total += 1
                    if f == fr and rr == r and cc == c:
                        continue
                    d = 0.0
                    if plane >= 0:
                        for y in range(ps):
                            for x in range(ps):
                                t = (
                                    planes[f, plane, rr + y, cc + x]
                                    - planes[fr, plane, r + y, c + x]
                                )
                                d += t * t
                    else:
                        for ch in range(3):
                            for y in range(ps):
                                for x in range(ps):
                                    t = (
                                        planes[f, ch, rr + y, cc + x]
                                        - planes[fr, ch, r + y, c + x]
                                    )
                                    d += t * t
                    if kk == 0:
                        continue
                    if nbest < kk:
                        pos = nbest
                        while pos > 0 and best_d[pos - 1] > d:
                            pos -= 1
                        for q in range(nbest, pos, -1):
                            best_d[q] = best_d[q - 1]
                            best_f[q] = best_f[q - 1]
                            best_r[q] = best_r[q - 1]
                            best_c[q] = best_c[q - 1]
                        best_d[pos] = d
                        best_f[pos] = f
                        best_r[pos] = rr
                        best_c[pos] = cc
                        nbest += 1
                    elif d < best_d[kk - 1]:
                        pos = kk - 1
                        while pos > 0 and best_d[pos - 1] > d:
                            pos -= 1
                        for q in range(kk - 1, pos, -1):
                            best_d[q] = best_d[q - 1]
                            best_f[q] = best_f[q - 1]
                            best_r[q] = best_r[q - 1]
                            best_c[q] = best_c[q - 1]
                        best_d[pos] = d
                        best_f[pos] = f
                        best_r[pos] = rr
                        best_c[pos] = cc
        count = total if total < k else k
        counts[i] = count
        members[i, 0, 0] = fr
        members[i, 0, 1] = r
        members[i, 0, 2] = c
        for j in range(count - 1):
            members[i, 1 + j, 0] = best_f[j]
            members[i, 1 + j, 1] = best_r[j]
            members[i, 1 + j, 2] = best_c[j]


def search_members(planes, rows, cols, frames, ps, window, k, lam, scheme_code):
    n = rows.shape[0]
    members = np.full((n, k, 3), -1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    _search(
        planes,
        rows,
        cols,
        frames,
        np.int64(ps),
        np.int64(window),
        np.int64(k),
        np.float64(lam),
        np.int64(scheme_code),
        members,
        counts,
    )
    return members, counts


@njit(cache=True)
def _scatter(num, den, members, counts, patches):
    n = patches.shape[0]
    ps = patches.shape[3]
    for i in range(n):
        for j in range(counts[i]):
            f = members[i, j, 0]
            r = members[i, j, 1]
            c = members[i, j, 2]
            for ch in range(3):
                for y in range(ps):
                    for x in range(ps):
                        num[f, ch, r + y, c + x] += patches[i, j, ch, y, x]
            for y in range(ps):
                for x in range(ps):
                    den[f, r + y, c + x] += 1.0


def scatter_add(num, den, members, counts, patches):
    _scatter(num, den, members, counts, patches)
