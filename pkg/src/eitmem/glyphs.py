"""Procedurally rendered digit masks.

The stand-in for resolution-chart artwork: seven-segment digits with round
caps, anti-aliased over one pixel, bright on a dark background.
"""

from __future__ import annotations

import numpy as np

from .pgm import read_pgm

# segment endpoints in glyph units: x in [0, 1], y in [0, 2], y pointing down
_SEGMENTS = {
    "a": ((0, 0), (1, 0)),
    "b": ((1, 0), (1, 1)),
    "c": ((1, 1), (1, 2)),
    "d": ((0, 2), (1, 2)),
    "e": ((0, 1), (0, 2)),
    "f": ((0, 0), (0, 1)),
    "g": ((0, 1), (1, 1)),
}

_DIGITS = {
    "0": "abcdef",
    "1": "bc",
    "2": "abged",
    "3": "abgcd",
    "4": "fgbc",
    "5": "afgcd",
    "6": "afgedc",
    "7": "abc",
    "8": "abcdefg",
    "9": "abcdfg",
}


def _segment_distance(px, py, p0, p1):
    (x0, y0), (x1, y1) = p0, p1
    vx, vy = x1 - x0, y1 - y0
    t = ((px - x0) * vx + (py - y0) * vy) / (vx * vx + vy * vy)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (x0 + t * vx), py - (y0 + t * vy))


def render_digit(digit: str, shape: tuple[int, int], height_fraction: float = 0.4,
                 stroke_fraction: float = 0.22, offset: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """Render ``digit`` into an 8-bit raster of the given ``(ny, nx)`` shape.

    ``height_fraction`` is the glyph height relative to ``ny``;
    ``stroke_fraction`` is the stroke width relative to the glyph width.
    ``offset`` shifts the glyph center by a fraction of the raster size.
    """
    if digit not in _DIGITS:
        raise ValueError(f"no glyph for {digit!r}")
    ny, nx = shape
    unit = height_fraction * ny / 2.0  # pixels per glyph unit
    half_stroke = 0.5 * stroke_fraction * unit
    cx = (nx - 1) / 2.0 + offset[0] * nx
    cy = (ny - 1) / 2.0 + offset[1] * ny
    yy, xx = np.mgrid[0:ny, 0:nx].astype(float)
    gx = (xx - cx) / unit + 0.5
    gy = (yy - cy) / unit + 1.0
    dist = np.full(shape, np.inf)
    for seg in _DIGITS[digit]:
        dist = np.minimum(dist, _segment_distance(gx, gy, *_SEGMENTS[seg]))
    # signed distance in pixels to the stroke edge
    edge = half_stroke - dist * unit
    cover = np.clip(edge + 0.5, 0.0, 1.0)
    return np.rint(255 * cover).astype(np.uint8)


def resolve_mask(spec: str, shape: tuple[int, int]) -> np.ndarray:
    """Resolve a mask reference: ``glyph:<digit>`` or a path to a P5 PGM."""
    if spec.startswith("glyph:"):
        return render_digit(spec[len("glyph:"):], shape)
    img = read_pgm(spec)
    if img.dtype != np.uint8:
        img = np.rint(img.astype(float) * 255.0 / max(int(img.max()), 1)).astype(np.uint8)
    return img
