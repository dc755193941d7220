"""Tensor algebra over length-4 channel fibers.

An RGGB patch is treated as a third-order tensor whose mode-3 fibers hold the
(R, G, G, B) channels. The t-product of such tensors is matrix multiplication
of their block-circulant expansions, computed fast as four independent matrix
products after a 4-point DFT along the fibers. Because the fibers are real,
Fourier slices 0 and 2 are real and slice 3 is the conjugate of slice 1, so
only three slices ever need computing.

The denoising transform learned per group combines:
  - per-slice unitary row/column bases (eigenvectors of the accumulated
    slice covariances),
  - an orthogonal K x K PCA basis across group members,
with the final inverse DFT bringing coefficients back to the real domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import PatchRef, RGGBGroup

__all__ = [
    "TransformSet",
    "CoeffGroup",
    "fft_mode3",
    "ifft_mode3",
    "bcirc",
    "t_identity",
    "t_transpose",
    "t_product",
    "t_product_bcirc",
    "t_svd",
    "learn_slice_bases",
    "learn_group_pca",
    "build_transform",
    "forward_transform",
    "inverse_transform",
]

_UNITARY_TOL = 1e-6


# ---------------------------------------------------------------------------
# 4-point DFT along an arbitrary axis (closed form, unnormalized forward)


def _fft4(x: np.ndarray, axis: int) -> np.ndarray:
    x = np.moveaxis(x, axis, -1)
    x0, x1, x2, x3 = (x[..., i] for i in range(4))
    even = x0 + x2
    odd = x1 + x3
    a = x0 - x2
    b = x1 - x3
    out = np.empty(x.shape, dtype=np.complex128)
    out[..., 0] = even + odd
    out[..., 1] = a - 1j * b
    out[..., 2] = even - odd
    out[..., 3] = a + 1j * b
    return np.moveaxis(out, -1, axis)


def _ifft4(x: np.ndarray, axis: int) -> np.ndarray:
    x = np.moveaxis(x, axis, -1)
    x0, x1, x2, x3 = (x[..., i] for i in range(4))
    even = x0 + x2
    odd = x1 + x3
    a = x0 - x2
    b = x1 - x3
    out = np.empty(x.shape, dtype=np.complex128)
    out[..., 0] = 0.25 * (even + odd)
    out[..., 1] = 0.25 * (a + 1j * b)
    out[..., 2] = 0.25 * (even - odd)
    out[..., 3] = 0.25 * (a - 1j * b)
    return np.moveaxis(out, -1, axis)


def _require_real(x: np.ndarray, what: str) -> np.ndarray:
    tol = 1e-9 * max(1.0, float(np.abs(x.real).max(initial=0.0)))
    residue = float(np.abs(x.imag).max(initial=0.0))
    if residue > tol:
        raise ValueError(f"{what}: imaginary residue {residue:.3e} exceeds {tol:.3e}")
    return np.ascontiguousarray(x.real)


def _as_fiber_tensor(t: np.ndarray, what: str) -> np.ndarray:
    t = np.asarray(t)
    if t.ndim != 3 or t.shape[2] != 4:
        raise ValueError(f"{what}: expected an (n1, n2, 4) tensor, got {t.shape}")
    if np.iscomplexobj(t):
        raise ValueError(f"{what}: expected a real tensor")
    return t.astype(np.float64, copy=False)


def fft_mode3(t: np.ndarray) -> np.ndarray:
    """DFT a real (n1, n2, 4) tensor along its fibers (unnormalized)."""
    return _fft4(_as_fiber_tensor(t, "fft_mode3"), axis=2)


def ifft_mode3(f: np.ndarray) -> np.ndarray:
    """Invert fft_mode3, checking the real-signal symmetry of the slices.

    Slices 0 and 2 must be real and slice 3 the conjugate of slice 1 (to
    1e-9 relative to the largest magnitude); anything else cannot come from
    a real tensor and raises.
    """
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 3 or f.shape[2] != 4:
        raise ValueError(f"ifft_mode3: expected (n1, n2, 4) slices, got {f.shape}")
    tol = 1e-9 * max(1.0, float(np.abs(f).max(initial=0.0)))
    for s in (0, 2):
        residue = float(np.abs(f[..., s].imag).max(initial=0.0))
        if residue > tol:
            raise ValueError(
                f"ifft_mode3: slice {s} has imaginary part {residue:.3e} > {tol:.3e}"
            )
    mismatch = float(np.abs(f[..., 3] - f[..., 1].conj()).max(initial=0.0))
    if mismatch > tol:
        raise ValueError(
            f"ifft_mode3: slice 3 deviates from conj(slice 1) by {mismatch:.3e}"
        )
    return _require_real(_ifft4(f, axis=2), "ifft_mode3")


# ---------------------------------------------------------------------------
# Block-circulant view and the t-product


def bcirc(t: np.ndarray) -> np.ndarray:
    """Expand an (n1, n2, 4) tensor into its (4*n1, 4*n2) block-circulant matrix."""
    t = _as_fiber_tensor(t, "bcirc")
    rows = [
        np.hstack([t[:, :, (i - j) % 4] for j in range(4)]) for i in range(4)
    ]
    return np.vstack(rows)


def t_identity(n: int) -> np.ndarray:
    """The identity tensor: eye in the first frontal slice, zero elsewhere."""
    t = np.zeros((n, n, 4))
    t[:, :, 0] = np.eye(n)
    return t


def t_transpose(t: np.ndarray) -> np.ndarray:
    """Tensor transpose: transpose each slice and reverse slices 1..3."""
    t = _as_fiber_tensor(t, "t_transpose")
    out = np.empty((t.shape[1], t.shape[0], 4))
    out[:, :, 0] = t[:, :, 0].T
    for s in range(1, 4):
        out[:, :, s] = t[:, :, 4 - s].T
    return out


def t_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """t-product via the Fourier fast path: slicewise matrix products."""
    a = _as_fiber_tensor(a, "t_product")
    b = _as_fiber_tensor(b, "t_product")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"t_product: inner dimensions differ, {a.shape} vs {b.shape}"
        )
    prod = np.einsum("abf,bcf->acf", _fft4(a, axis=2), _fft4(b, axis=2))
    return _require_real(_ifft4(prod, axis=2), "t_product")


def t_product_bcirc(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Reference t-product: dense block-circulant multiplication, then fold."""
    a = _as_fiber_tensor(a, "t_product_bcirc")
    b = _as_fiber_tensor(b, "t_product_bcirc")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"t_product_bcirc: inner dimensions differ, {a.shape} vs {b.shape}"
        )
    big = bcirc(a) @ bcirc(b)
    n1, n3 = a.shape[0], b.shape[1]
    return np.stack([big[s * n1 : (s + 1) * n1, :n3] for s in range(4)], axis=2)


def t_svd(t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """t-SVD: real tensors (U, S, V) with t = U * S * t_transpose(V).

    Each Fourier slice of S is diagonal with nonnegative, non-increasing
    entries. Slices 0 and 2 use the real SVD (those slices are real), slice 3
    mirrors slice 1, keeping the inverse DFT real.
    """
    t = _as_fiber_tensor(t, "t_svd")
    n1, n2 = t.shape[:2]
    that = _fft4(t, axis=2)
    uhat = np.empty((n1, n1, 4), dtype=np.complex128)
    shat = np.zeros((n1, n2, 4), dtype=np.complex128)
    vhat = np.empty((n2, n2, 4), dtype=np.complex128)
    diag = np.arange(min(n1, n2))
    for f in (0, 2):
        u, s, vh = np.linalg.svd(that[:, :, f].real)
        uhat[:, :, f] = u
        shat[diag, diag, f] = s
        vhat[:, :, f] = vh.T
    u, s, vh = np.linalg.svd(that[:, :, 1])
    uhat[:, :, 1] = u
    shat[diag, diag, 1] = s
    vhat[:, :, 1] = vh.conj().T
    uhat[:, :, 3] = u.conj()
    shat[diag, diag, 3] = s
    vhat[:, :, 3] = vh.T
    return (
        _require_real(_ifft4(uhat, axis=2), "t_svd U"),
        _require_real(_ifft4(shat, axis=2), "t_svd S"),
        _require_real(_ifft4(vhat, axis=2), "t_svd V"),
    )


# ---------------------------------------------------------------------------
# Learned per-group transforms


@dataclass(frozen=True)
class TransformSet:
    """Separable group transform: per-slice unitary bases + member PCA.

    u_row and u_col hold one complex ps x ps unitary matrix per Fourier slice
    (shape (4, ps, ps)); u_group is a real orthogonal K x K matrix whose
    columns are the member-axis principal directions.
    """

    u_row: np.ndarray
    u_col: np.ndarray
    u_group: np.ndarray

    def __post_init__(self) -> None:
        u_row = np.ascontiguousarray(self.u_row, dtype=np.complex128)
        u_col = np.ascontiguousarray(self.u_col, dtype=np.complex128)
        u_group = np.ascontiguousarray(self.u_group, dtype=np.float64)
        for name, u in (("u_row", u_row), ("u_col", u_col)):
            if u.ndim != 3 or u.shape[0] != 4 or u.shape[1] != u.shape[2]:
                raise ValueError(f"{name}: expected (4, ps, ps), got {u.shape}")
            eye = np.eye(u.shape[1])
            for f in range(4):
                if np.abs(u[f].conj().T @ u[f] - eye).max() > _UNITARY_TOL:
                    raise ValueError(f"{name}[{f}] is not unitary")
            if np.abs(u[3] - u[1].conj()).max() > _UNITARY_TOL:
                raise ValueError(f"{name}: slice 3 must be conj(slice 1)")
            if max(np.abs(u[0].imag).max(), np.abs(u[2].imag).max()) > _UNITARY_TOL:
                raise ValueError(f"{name}: slices 0 and 2 must be real")
        if u_group.ndim != 2 or u_group.shape[0] != u_group.shape[1]:
            raise ValueError(f"u_group: expected (K, K), got {u_group.shape}")
        if np.abs(u_group.T @ u_group - np.eye(len(u_group))).max() > _UNITARY_TOL:
            raise ValueError("u_group is not orthogonal")
        for name, u in (("u_row", u_row), ("u_col", u_col), ("u_group", u_group)):
            u.flags.writeable = False
            object.__setattr__(self, name, u)

    @property
    def ps(self) -> int:
        return self.u_row.shape[1]

    @property
    def k(self) -> int:
        return self.u_group.shape[0]


@dataclass(frozen=True)
class CoeffGroup:
    """Real transform coefficients of a group, shape (ps, ps, 4, K)."""

    data: np.ndarray
    members: tuple[PatchRef, ...]
    retained_count: int | None = None

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        members = tuple(self.members)
        if data.ndim != 4 or data.shape[2] != 4 or data.shape[3] != len(members):
            raise ValueError(
                f"expected (ps, ps, 4, {len(members)}) coefficients, got {data.shape}"
            )
        if self.retained_count is not None and not (
            0 <= self.retained_count <= data.size
        ):
            raise ValueError(f"retained_count {self.retained_count} out of range")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "members", members)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Scale each column so its largest-magnitude entry is real positive.

    Among equal magnitudes the lowest row index wins; all-zero columns are
    left alone.
    """
    mag = np.abs(v)
    idx = mag.argmax(axis=-2)
    lead = np.take_along_axis(v, idx[..., None, :], axis=-2)[..., 0, :]
    lead_mag = np.abs(lead)
    safe = np.where(lead_mag > 0.0, lead_mag, 1.0)
    factor = np.where(lead_mag > 0.0, np.conj(lead) / safe, np.ones_like(lead))
    return v * factor[..., None, :]


def _descending_eigvecs(m: np.ndarray) -> np.ndarray:
    """Eigenvectors of stacked Hermitian matrices, descending eigenvalues."""
    _, v = np.linalg.eigh(m)
    return _fix_phase(v[..., ::-1])


def _slice_bases_stacked(
    ghat: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Row/col bases for stacked groups: ghat (n, p, q, 4, K) complex."""
    n, p, q = ghat.shape[0], ghat.shape[1], ghat.shape[2]
    u_row = np.empty((n, 4, p, p), dtype=np.complex128)
    u_col = np.empty((n, 4, q, q), dtype=np.complex128)
    for f in range(3):
        sl = ghat[:, :, :, f, :]
        if f != 1:
            sl = np.ascontiguousarray(sl.real)
        # Row covariance sums P P^H over members, column covariance P^H P;
        # both are batched matmuls once the summed axes sit together.
        x = sl.reshape(n, p, q * sl.shape[3])
        m_row = x @ x.conj().transpose(0, 2, 1)
        y = np.ascontiguousarray(sl.transpose(0, 1, 3, 2)).reshape(n, -1, q)
        m_col = y.conj().transpose(0, 2, 1) @ y
        u_row[:, f] = _descending_eigvecs(m_row)
        u_col[:, f] = _descending_eigvecs(m_col)
        zero = (np.abs(sl) ** 2).sum(axis=(1, 2, 3)) == 0.0
        if np.any(zero):
            u_row[zero, f] = np.eye(p)
            u_col[zero, f] = np.eye(q)
    u_row[:, 3] = u_row[:, 1].conj()
    u_col[:, 3] = u_col[:, 1].conj()
    return u_row, u_col


def _group_pca_stacked(groups: np.ndarray) -> np.ndarray:
    """Member-axis PCA for stacked groups (n, p, q, 4, K) -> (n, K, K)."""
    n, k = groups.shape[0], groups.shape[4]
    x = groups.reshape(n, -1, k)
    gram = x.transpose(0, 2, 1) @ x
    u = _descending_eigvecs(gram)
    zero = np.einsum("nkk->n", gram) == 0.0
    if np.any(zero):
        u[zero] = np.eye(k)
    return u


def _to_slice_major(spectral: np.ndarray) -> np.ndarray:
    """(n, p, q, 4, K) -> contiguous (n, 4, K, p, q) for batched matmul."""
    return np.ascontiguousarray(np.moveaxis(spectral, (3, 4), (1, 2)))


def _from_slice_major(x: np.ndarray) -> np.ndarray:
    """(n, 4, K, p, q) -> (n, p, q, 4, K)."""
    return np.moveaxis(x, (1, 2), (3, 4))


def _forward_stacked(
    groups: np.ndarray,
    u_row: np.ndarray,
    u_col: np.ndarray,
    u_group: np.ndarray,
) -> np.ndarray:
    """Analysis transform for stacked groups; returns real coefficients.

    All contractions run as batched matmuls: per-slice basis rotations over
    the (p, q) patch axes, then one real mixing matrix over the member axis.
    """
    n, p, q, _, k = groups.shape
    x = _to_slice_major(_fft4(groups, axis=3))
    out = np.empty_like(x)
    for f in range(3):
        uh = u_row[:, f].conj().transpose(0, 2, 1)[:, None]
        out[:, f] = uh @ x[:, f] @ u_col[:, f][:, None]
    out[:, 3] = out[:, 1].conj()
    z = out.transpose(0, 1, 3, 4, 2).reshape(n, 4 * p * q, k)
    mixed = z @ u_group.astype(np.complex128)
    spectral = _from_slice_major(
        mixed.reshape(n, 4, p, q, k).transpose(0, 1, 4, 2, 3)
    )
    return _require_real(_ifft4(spectral, axis=3), "forward transform")


def _inverse_stacked(
    coeffs: np.ndarray,
    u_row: np.ndarray,
    u_col: np.ndarray,
    u_group: np.ndarray,
) -> np.ndarray:
    """Exact adjoint of _forward_stacked; returns real group data.

    The member mixing and the per-slice rotations act on disjoint axes, so
    undoing them in either order is exact; here the rotations unwind first.
    """
    n, p, q, _, k = coeffs.shape
    x = _to_slice_major(_fft4(coeffs, axis=3))
    out = np.empty_like(x)
    for f in range(3):
        uch = u_col[:, f].conj().transpose(0, 2, 1)[:, None]
        out[:, f] = u_row[:, f][:, None] @ x[:, f] @ uch
    out[:, 3] = out[:, 1].conj()
    z = out.transpose(0, 1, 3, 4, 2).reshape(n, 4 * p * q, k)
    unmixed = z @ u_group.astype(np.complex128).transpose(0, 2, 1)
    spectral = _from_slice_major(
        unmixed.reshape(n, 4, p, q, k).transpose(0, 1, 4, 2, 3)
    )
    return _require_real(_ifft4(spectral, axis=3), "inverse transform")


def learn_slice_bases(g: RGGBGroup) -> tuple[np.ndarray, np.ndarray]:
    """Learn the shared per-slice row/column bases of a group.

    Returns (u_row, u_col), each (4, ps, ps) complex unitary: eigenvectors of
    the accumulated slice covariances, eigenvalues descending, each vector
    phased so its largest entry is real positive. All-zero slices keep the
    identity basis.
    """
    ghat = _fft4(g.data, axis=2)[None]
    u_row, u_col = _slice_bases_stacked(ghat)
    return u_row[0], u_col[0]


def learn_group_pca(g: RGGBGroup) -> np.ndarray:
    """Orthogonal K x K basis: eigenvectors of the member Gram matrix."""
    return _group_pca_stacked(g.data[None])[0]


def build_transform(g: RGGBGroup) -> TransformSet:
    """Learn the full transform set of a group."""
    u_row, u_col = learn_slice_bases(g)
    return TransformSet(u_row=u_row, u_col=u_col, u_group=learn_group_pca(g))


def _check_transform_fits(g_ps: int, g_k: int, t: TransformSet, what: str) -> None:
    if t.ps != g_ps:
        raise ValueError(f"{what}: transform is for ps={t.ps}, group has ps={g_ps}")
    if t.k != g_k:
        raise ValueError(f"{what}: transform is for K={t.k}, group has K={g_k}")


def forward_transform(g: RGGBGroup, t: TransformSet) -> CoeffGroup:
    """Project a group onto its learned bases; coefficients are real."""
    _check_transform_fits(g.ps, g.k, t, "forward_transform")
    data = _forward_stacked(
        g.data[None], t.u_row[None], t.u_col[None], t.u_group[None]
    )[0]
    return CoeffGroup(data=data, members=g.members)


def inverse_transform(c: CoeffGroup, t: TransformSet) -> RGGBGroup:
    """Map coefficients back to patch space (exact inverse of the forward)."""
    _check_transform_fits(c.data.shape[0], c.data.shape[3], t, "inverse_transform")
    data = _inverse_stacked(
        c.data[None], t.u_row[None], t.u_col[None], t.u_group[None]
    )[0]
    return RGGBGroup(data=data, members=c.members)
