"""Binary portable graymap (P5) reading and writing."""

from __future__ import annotations

import os
import re

import numpy as np

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    pos = 2
    out = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ValueError("truncated PGM header")
        out.append(int(m.group(1)))
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    return out, pos + 1


def decode_pgm(data: bytes) -> np.ndarray:
    if data[:2] != b"P5":
        raise ValueError("not a binary PGM (missing P5 magic)")
    (w, h, maxval), start = _header_tokens(data, 3)
    if not 0 < maxval < 65536:
        raise ValueError(f"invalid PGM maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = w * h * dtype.itemsize
    raster = data[start:start + n]
    if len(raster) != n:
        raise ValueError(f"PGM raster truncated: expected {n} bytes, got {len(raster)}")
    arr = np.frombuffer(raster, dtype=dtype).reshape(h, w)
    return arr.astype(np.uint16 if maxval > 255 else np.uint8)


def encode_pgm(image: np.ndarray, maxval: int = 255) -> bytes:
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("PGM images must be 2-D")
    if img.min(initial=0) < 0 or img.max(initial=0) > maxval:
        raise ValueError(f"pixel values must lie in [0, {maxval}]")
    h, w = img.shape
    header = b"P5\n%d %d\n%d\n" % (w, h, maxval)
    dtype = ">u2" if maxval > 255 else "u1"
    return header + np.ascontiguousarray(img, dtype=dtype).tobytes()


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def write_pgm(path: str | os.PathLike, image: np.ndarray, maxval: int = 255) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(image, maxval))


def to_uint16(image: np.ndarray) -> tuple[np.ndarray, float]:
    """Quantize a nonnegative real image into 16 bits.

    Returns the quantized raster and the counts-per-level scale; the scale is
    1 unless the image would overflow 65535.
    """
    img = np.clip(np.asarray(image, dtype=float), 0, None)
    peak = img.max(initial=0.0)
    scale = 1.0 if peak <= 65535 else peak / 65535.0
    return np.rint(img / scale).astype(np.uint16), scale
