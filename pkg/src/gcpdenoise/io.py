"""Image and video file handling: binary PPM (P6) and a minimal PNG codec.

The PNG support covers exactly what the benchmark needs: 8-bit grayscale and
RGB, no interlacing, all five scanline filters on decode, filter-0 rows and
zlib compression on encode. Chunk CRCs are verified on load.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .image import Image, VideoSequence, quantize

__all__ = [
    "load_ppm",
    "save_ppm",
    "load_png",
    "save_png",
    "load_image",
    "save_image",
    "load_video",
    "save_video",
]

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\r\n\v\f"


# ---------------------------------------------------------------------------
# PPM (P6)
# ---------------------------------------------------------------------------


def _ppm_tokens(blob: bytes, path: Path):
    """Header tokens of a PNM file, honoring '#' comments."""
    i = 0
    while True:
        while i < len(blob) and blob[i : i + 1] in _WHITESPACE:
            i += 1
        if i < len(blob) and blob[i : i + 1] == b"#":
            while i < len(blob) and blob[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(blob) and blob[i : i + 1] not in _WHITESPACE and blob[i : i + 1] != b"#":
            i += 1
        if start == i:
            raise ValueError(f"{path}: truncated PPM header")
        yield blob[start:i].decode("ascii"), i


def load_ppm(path: str | Path) -> Image:
    """Read a binary (P6) portable pixmap as an RGB image."""
    path = Path(path)
    blob = path.read_bytes()
    tokens = _ppm_tokens(blob, path)
    magic, _ = next(tokens)
    if magic != "P6":
        raise ValueError(f"{path}: expected a P6 pixmap, got magic {magic!r}")
    (w_tok, _), (h_tok, _), (max_tok, end) = (next(tokens) for _ in range(3))
    width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: unsupported maxval {maxval} (only 8-bit data)")
    data = blob[end + 1 :]  # exactly one whitespace byte after maxval
    need = width * height * 3
    if len(data) < need:
        raise ValueError(
            f"{path}: truncated pixel data, expected {need} bytes, got {len(data)}"
        )
    raster = np.frombuffer(data[:need], dtype=np.uint8).reshape(height, width, 3)
    return Image.from_interleaved(raster.astype(np.float64))


def save_ppm(path: str | Path, img: Image) -> None:
    """Write an RGB image as a binary (P6) portable pixmap."""
    if img.channels != 3:
        raise ValueError(f"PPM requires an RGB image, got {img.channels} channels")
    raster = quantize(img)
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + raster.tobytes())


# ---------------------------------------------------------------------------
# PNG
# ---------------------------------------------------------------------------


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload))
    )


def save_png(path: str | Path, img: Image) -> None:
    """Write an 8-bit grayscale or RGB PNG (filter 0 scanlines)."""
    if img.channels not in (1, 3):
        raise ValueError(
            f"PNG writer supports 1- or 3-channel images, got {img.channels}"
        )
    raster = quantize(img)
    h, w, ch = raster.shape
    color_type = 2 if ch == 3 else 0
    scanlines = bytearray()
    for y in range(h):
        scanlines.append(0)
        scanlines.extend(raster[y].tobytes())
    blob = (
        _PNG_SIGNATURE
        + _png_chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0))
        + _png_chunk(b"IDAT", zlib.compress(bytes(scanlines)))
        + _png_chunk(b"IEND", b"")
    )
    Path(path).write_bytes(blob)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _unfilter(raw: bytes, h: int, w: int, ch: int, path: Path) -> np.ndarray:
    stride = w * ch
    if len(raw) != h * (1 + stride):
        raise ValueError(
            f"{path}: decompressed image data has {len(raw)} bytes, "
            f"expected {h * (1 + stride)}"
        )
    out = np.zeros((h, stride), dtype=np.uint8)
    prior = np.zeros(stride, dtype=np.intp)
    for y in range(h):
        ftype = raw[y * (1 + stride)]
        line = np.frombuffer(
            raw, dtype=np.uint8, count=stride, offset=y * (1 + stride) + 1
        ).astype(np.intp)
        if ftype == 0:
            recon = line
        elif ftype == 2:
            recon = (line + prior) & 0xFF
        elif ftype in (1, 3, 4):
            recon = np.empty(stride, dtype=np.intp)
            for i in range(stride):
                left = recon[i - ch] if i >= ch else 0
                if ftype == 1:
                    v = line[i] + left
                elif ftype == 3:
                    v = line[i] + (left + prior[i]) // 2
                else:
                    ul = prior[i - ch] if i >= ch else 0
                    v = line[i] + _paeth(int(left), int(prior[i]), int(ul))
                recon[i] = v & 0xFF
        else:
            raise ValueError(f"{path}: unknown scanline filter {ftype}")
        out[y] = recon
        prior = recon
    return out.reshape(h, w, ch)


def load_png(path: str | Path) -> Image:
    """Read an 8-bit grayscale or RGB PNG."""
    path = Path(path)
    blob = path.read_bytes()
    if blob[:8] != _PNG_SIGNATURE:
        raise ValueError(f"{path}: not a PNG (bad signature)")
    pos = 8
    ihdr = None
    idat = bytearray()
    while pos < len(blob):
        if pos + 8 > len(blob):
            raise ValueError(f"{path}: truncated chunk header")
        (length,) = struct.unpack(">I", blob[pos : pos + 4])
        tag = blob[pos + 4 : pos + 8]
        payload = blob[pos + 8 : pos + 8 + length]
        if len(payload) != length or pos + 12 + length > len(blob):
            raise ValueError(f"{path}: truncated {tag!r} chunk")
        (crc,) = struct.unpack(">I", blob[pos + 8 + length : pos + 12 + length])
        if crc != zlib.crc32(tag + payload):
            raise ValueError(f"{path}: CRC mismatch in {tag!r} chunk")
        pos += 12 + length
        if tag == b"IHDR":
            ihdr = payload
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if ihdr is None:
        raise ValueError(f"{path}: missing IHDR chunk")
    w, h, depth, color_type, comp, filt, interlace = struct.unpack(">IIBBBBB", ihdr)
    if depth != 8:
        raise ValueError(f"{path}: unsupported bit depth {depth} (only 8)")
    if color_type not in (0, 2):
        raise ValueError(
            f"{path}: unsupported color type {color_type} (grayscale or RGB only)"
        )
    if interlace != 0:
        raise ValueError(f"{path}: interlaced PNG not supported")
    if comp != 0 or filt != 0:
        raise ValueError(f"{path}: unsupported compression/filter method")
    if not idat:
        raise ValueError(f"{path}: missing IDAT data")
    raw = zlib.decompress(bytes(idat))
    ch = 3 if color_type == 2 else 1
    raster = _unfilter(raw, h, w, ch, path)
    return Image.from_interleaved(raster.astype(np.float64))


# ---------------------------------------------------------------------------
# extension dispatch and video directories
# ---------------------------------------------------------------------------

_LOADERS = {".ppm": load_ppm, ".png": load_png}
_SAVERS = {".ppm": save_ppm, ".png": save_png}


def load_image(path: str | Path) -> Image:
    """Load .png or .ppm based on the file extension."""
    path = Path(path)
    loader = _LOADERS.get(path.suffix.lower())
    if loader is None:
        raise ValueError(f"{path}: unsupported image extension {path.suffix!r}")
    return loader(path)


def save_image(path: str | Path, img: Image) -> None:
    """Save .png or .ppm based on the file extension."""
    path = Path(path)
    saver = _SAVERS.get(path.suffix.lower())
    if saver is None:
        raise ValueError(f"{path}: unsupported image extension {path.suffix!r}")
    saver(path, img)


def load_video(path: str | Path) -> VideoSequence:
    """Load every .png/.ppm in a directory, sorted by name, as a sequence."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"{path}: not a directory")
    names = sorted(
        p for p in path.iterdir() if p.suffix.lower() in _LOADERS and p.is_file()
    )
    if not names:
        raise ValueError(f"{path}: no frames (*.png / *.ppm) found")
    return VideoSequence(frames=tuple(load_image(p) for p in names))


def save_video(path: str | Path, video: VideoSequence) -> None:
    """Write frames as zero-padded frame_###.png files in a directory."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(video.frames):
        save_png(path / f"frame_{i:03d}.png", frame)
