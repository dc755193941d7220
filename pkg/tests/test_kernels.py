"""Backend dispatch and numpy/numba kernel equivalence.

The numba kernels must reproduce the numpy reference kernels exactly:
identical member lists (including tie-breaking) and identical aggregation
sums. The env flag and set_backend() control which implementation runs.
"""

import importlib
import os

import numpy as np
import pytest

from gcpdenoise import _backend
from gcpdenoise import _kernels as knp
from gcpdenoise.image import DenoiseConfig, Image, add_awgn
from gcpdenoise.search import SearchScheme, search_members_batch, search_planes

knb = pytest.importorskip("gcpdenoise._kernels_numba")


@pytest.fixture(autouse=True)
def _restore_backend():
    prev = _backend.active_backend()
    yield
    _backend.set_backend(prev)


def _random_image(rng, h=48, w=40):
    return Image.from_planes(rng.uniform(0.0, 255.0, size=(3, h, w)))


def _random_refs(rng, h, w, ps, n):
    rows = rng.integers(0, h - ps + 1, size=n).astype(np.int64)
    cols = rng.integers(0, w - ps + 1, size=n).astype(np.int64)
    frames = np.zeros(n, dtype=np.int64)
    return rows, cols, frames


# ---------------------------------------------------------------------------
# search kernel equivalence
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("code", [0, 1, 2, 3])
def test_search_members_numba_matches_numpy(code):
    rng = np.random.default_rng(7_000 + code)
    img = _random_image(rng)
    planes = search_planes(img)
    rows, cols, frames = _random_refs(rng, img.height, img.width, 8, 40)
    args = (planes, rows, cols, frames, 8, 20, 12, 0.8, code)
    m_np, c_np = knp.search_members(*args)
    m_nb, c_nb = knb.search_members(*args)
    np.testing.assert_array_equal(c_np, c_nb)
    np.testing.assert_array_equal(m_np, m_nb)


def test_search_members_numba_matches_numpy_with_ties():
    # Quantized pixel values force many exact distance ties; the insertion
    # sort must break them identically to the stable argsort.
    rng = np.random.default_rng(911)
    planes_rgb = rng.integers(0, 3, size=(1, 3, 32, 32)).astype(np.float64)
    planes = np.ascontiguousarray(
        np.concatenate([planes_rgb, planes_rgb.mean(axis=1, keepdims=True)], axis=1)
    )
    rows, cols, frames = _random_refs(rng, 32, 32, 4, 60)
    args = (planes, rows, cols, frames, 4, 16, 10, 0.8, 3)
    m_np, c_np = knp.search_members(*args)
    m_nb, c_nb = knb.search_members(*args)
    np.testing.assert_array_equal(c_np, c_nb)
    np.testing.assert_array_equal(m_np, m_nb)


def test_search_members_numba_matches_numpy_multiframe():
    rng = np.random.default_rng(4242)
    rgb = rng.uniform(0.0, 255.0, size=(3, 3, 36, 36))
    planes = np.ascontiguousarray(
        np.concatenate([rgb, rgb.mean(axis=1, keepdims=True)], axis=1)
    )
    rows, cols, _ = _random_refs(rng, 36, 36, 8, 30)
    frames = rng.integers(0, 3, size=30).astype(np.int64)
    args = (planes, rows, cols, frames, 8, 16, 20, 0.8, 0)
    m_np, c_np = knp.search_members(*args)
    m_nb, c_nb = knb.search_members(*args)
    np.testing.assert_array_equal(c_np, c_nb)
    np.testing.assert_array_equal(m_np, m_nb)


# ---------------------------------------------------------------------------
# scatter kernel equivalence
# ---------------------------------------------------------------------------


def test_scatter_add_numba_matches_numpy():
    rng = np.random.default_rng(55)
    nf, h, w, ps, k, n = 2, 24, 20, 6, 8, 15
    members = np.stack(
        [
            rng.integers(0, nf, size=(n, k)),
            rng.integers(0, h - ps + 1, size=(n, k)),
            rng.integers(0, w - ps + 1, size=(n, k)),
        ],
        axis=-1,
    ).astype(np.int64)
    counts = rng.integers(1, k + 1, size=n).astype(np.int64)
    patches = rng.normal(size=(n, k, 3, ps, ps))

    num_np = np.zeros((nf, 3, h, w))
    den_np = np.zeros((nf, h, w))
    knp.scatter_add(num_np, den_np, members, counts, patches)

    num_nb = np.zeros((nf, 3, h, w))
    den_nb = np.zeros((nf, h, w))
    knb.scatter_add(num_nb, den_nb, members, counts, patches)

    np.testing.assert_allclose(num_nb, num_np, rtol=0, atol=1e-12)
    np.testing.assert_allclose(den_nb, den_np, rtol=0, atol=1e-12)


def test_scatter_add_counts_exact_footprint():
    # Slots at index >= count must not contribute.
    members = np.zeros((1, 3, 3), dtype=np.int64)
    members[0, 1] = (0, 2, 2)
    members[0, 2] = (0, 4, 4)
    counts = np.array([2], dtype=np.int64)
    patches = np.ones((1, 3, 3, 2, 2))
    for mod in (knp, knb):
        num = np.zeros((1, 3, 8, 8))
        den = np.zeros((1, 8, 8))
        mod.scatter_add(num, den, members, counts, patches)
        expect = np.zeros((8, 8))
        expect[0:2, 0:2] += 1
        expect[2:4, 2:4] += 1
        np.testing.assert_array_equal(den[0], expect)
        assert num[0, :, 4:6, 4:6].sum() == 0.0  # ignored slot


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------


def test_set_backend_roundtrip():
    _backend.set_backend("numpy")
    assert _backend.active_backend() == "numpy"
    assert _backend.kernels() is knp
    _backend.set_backend("numba")
    assert _backend.active_backend() == "numba"
    assert _backend.kernels() is knb


@pytest.mark.parametrize(
    "value,expected",
    [
        ("0", "numpy"),
        ("off", "numpy"),
        ("false", "numpy"),
        ("numpy", "numpy"),
        ("1", "numba"),
        ("on", "numba"),
        ("numba", "numba"),
        ("auto", "numba"),  # numba is installed here, so auto resolves to it
    ],
)
def test_env_flag_resolution(value, expected, monkeypatch):
    monkeypatch.setenv(_backend.ENV_VAR, value)
    _backend.set_backend(None)  # force re-resolution from the environment
    assert _backend.active_backend() == expected


def test_env_flag_invalid(monkeypatch):
    monkeypatch.setenv(_backend.ENV_VAR, "turbo")
    _backend.set_backend(None)
    with pytest.raises(ValueError, match="turbo"):
        _backend.kernels()


def test_set_backend_invalid():
    with pytest.raises(ValueError, match="warp"):
        _backend.set_backend("warp")


# ---------------------------------------------------------------------------
# end-to-end equivalence through the public search API
# ---------------------------------------------------------------------------


def test_search_api_identical_across_backends():
    rng = np.random.default_rng(31337)
    clean = _random_image(rng, 40, 40)
    noisy = add_awgn(clean, sigma=25.0, seed=5)
    cfg = DenoiseConfig(sigma=25.0, ps=8, window=16, k=16)
    rows, cols, frames = _random_refs(rng, 40, 40, 8, 25)
    planes = search_planes(noisy)
    results = {}
    for name in ("numpy", "numba"):
        _backend.set_backend(name)
        results[name] = search_members_batch(
            planes, rows, cols, frames, cfg, SearchScheme.GREEN_GUIDED
        )
    np.testing.assert_array_equal(results["numpy"][0], results["numba"][0])
    np.testing.assert_array_equal(results["numpy"][1], results["numba"][1])
