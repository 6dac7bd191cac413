"""Outline rasterizer for the bundled monospace font.

Glyph outlines are read with fontTools and rasterized here, never through a
platform font engine, so the same glyph is bit-identical everywhere.

Rasterization rule (normative, tests depend on it):

* Quadratic and cubic segments are flattened into ``CURVE_STEPS`` straight
  pieces at uniform parameter steps.
* Each pixel row is sampled by ``SUBROWS`` horizontal scanlines at
  ``y = row + (s + 0.5) / SUBROWS``. Along each scanline the nonzero winding
  rule yields ink spans; the exact horizontal overlap of each span with each
  pixel is accumulated.
* Coverage is the accumulated overlap divided by ``SUBROWS``, clamped to
  ``[0, 1]`` and quantized as ``floor(coverage * 255 + 0.5)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from fontTools.pens.basePen import BasePen
from fontTools.pens.boundsPen import BoundsPen
from fontTools.ttLib import TTFont

ASSETS = Path(__file__).resolve().parent.parent / "assets"
FONT_FILE = "DejaVuSansMono.ttf"
CURVE_STEPS = 8
SUBROWS = 8


@dataclass(frozen=True)
class GlyphBitmap:
    """8-bit ink coverage for one glyph.

    ``left`` and ``top`` place the bitmap relative to the cell origin, which
    sits on the baseline at the left edge of the character cell.
    """

    coverage: np.ndarray
    left: int
    top: int


class _FlattenPen(BasePen):
    def __init__(self, glyphset, transform):
        super().__init__(glyphset)
        self.contours: list[list[tuple[float, float]]] = []
        self._current: list[tuple[float, float]] = []
        self._xf = transform

    def _moveTo(self, pt):
        self._current = [self._xf(pt)]

    def _lineTo(self, pt):
        self._current.append(self._xf(pt))

    def _qCurveToOne(self, pt1, pt2):
        x0, y0 = self._getCurrentPoint()
        for i in range(1, CURVE_STEPS + 1):
            t = i / CURVE_STEPS
            u = 1.0 - t
            x = u * u * x0 + 2 * u * t * pt1[0] + t * t * pt2[0]
            y = u * u * y0 + 2 * u * t * pt1[1] + t * t * pt2[1]
            self._current.append(self._xf((x, y)))

    def _curveToOne(self, pt1, pt2, pt3):
        x0, y0 = self._getCurrentPoint()
        for i in range(1, CURVE_STEPS + 1):
            t = i / CURVE_STEPS
            u = 1.0 - t
            a, b, c, d = u * u * u, 3 * u * u * t, 3 * u * t * t, t * t * t
            x = a * x0 + b * pt1[0] + c * pt2[0] + d * pt3[0]
            y = a * y0 + b * pt1[1] + c * pt2[1] + d * pt3[1]
            self._current.append(self._xf((x, y)))

    def _closePath(self):
        if len(self._current) > 1:
            self.contours.append(self._current)
        self._current = []

    _endPath = _closePath


def rasterize_polygons(contours, width: int, height: int) -> np.ndarray:
    """Nonzero-winding coverage of closed polygons on a ``height x width`` grid."""
    acc = np.zeros((height, width), dtype=np.float64)
    edges = []
    for contour in contours:
        n = len(contour)
        for i in range(n):
            (xa, ya), (xb, yb) = contour[i], contour[(i + 1) % n]
            if ya == yb:
                continue
            if ya < yb:
                edges.append((xa, ya, xb, yb, 1))
            else:
                edges.append((xb, yb, xa, ya, -1))
    if not edges or width <= 0 or height <= 0:
        return np.zeros((height, width), dtype=np.uint8)
    e = np.array(edges, dtype=np.float64)
    ex0, ey0, ex1, ey1, edir = e[:, 0], e[:, 1], e[:, 2], e[:, 3], e[:, 4]
    slope = (ex1 - ex0) / (ey1 - ey0)

    for row in range(height):
        line = acc[row]
        for s in range(SUBROWS):
            y = row + (s + 0.5) / SUBROWS
            hit = (ey0 <= y) & (y < ey1)
            if not hit.any():
                continue
            xs = ex0[hit] + (y - ey0[hit]) * slope[hit]
            dirs = edir[hit]
            order = np.lexsort((dirs, xs))
            xs, dirs = xs[order], dirs[order]
            winding = 0
            start = 0.0
            for x, d in zip(xs.tolist(), dirs.tolist()):
                before = winding
                winding += int(d)
                if before == 0 and winding != 0:
                    start = x
                elif before != 0 and winding == 0:
                    _add_span(line, start, x, width)
    cov = np.clip(acc / SUBROWS, 0.0, 1.0)
    return np.floor(cov * 255.0 + 0.5).astype(np.uint8)


def _add_span(line: np.ndarray, a: float, b: float, width: int) -> None:
    a = max(a, 0.0)
    b = min(b, float(width))
    if b <= a:
        return
    ia, ib = int(math.floor(a)), int(math.floor(b))
    if ia == ib:
        line[ia] += b - a
        return
    line[ia] += ia + 1 - a
    if ib > ia + 1:
        line[ia + 1 : ib] += 1.0
    if ib < width:
        line[ib] += b - ib


class MonoFont:
    """The bundled monospace font at one pixel size."""

    def __init__(self, size: int, path: str | Path | None = None):
        if size <= 0:
            raise ValueError("font size must be positive")
        self.size = size
        self._tt = TTFont(str(path or ASSETS / "fonts" / FONT_FILE))
        self._glyphset = self._tt.getGlyphSet()
        self._cmap = self._tt.getBestCmap()
        self.units_per_em = self._tt["head"].unitsPerEm
        self.scale = size / self.units_per_em
        os2 = self._tt["OS/2"]
        self.ascent = os2.sTypoAscender * self.scale
        self.descent = -os2.sTypoDescender * self.scale
        adv_units = self._tt["hmtx"][self._cmap[ord("0")]][0]
        # integral advance keeps every cell origin on the pixel grid
        self.advance = max(1, int(math.floor(adv_units * self.scale + 0.5)))
        self._cache: dict[str, GlyphBitmap] = {}

    def has_glyph(self, ch: str) -> bool:
        return ord(ch) in self._cmap

    def glyph(self, ch: str) -> GlyphBitmap:
        """Coverage bitmap for ``ch``; unmapped characters get ``.notdef``."""
        bm = self._cache.get(ch)
        if bm is None:
            name = self._cmap.get(ord(ch), ".notdef")
            bm = self._cache.get("\0" + name)
            if bm is None:
                bm = self._rasterize(name)
                self._cache["\0" + name] = bm
            self._cache[ch] = bm
        return bm

    def _rasterize(self, name: str) -> GlyphBitmap:
        scale = self.scale
        glyph = self._glyphset[name]
        bounds = _bounds(self._glyphset, name)
        if bounds is None:
            return GlyphBitmap(np.zeros((0, 0), dtype=np.uint8), 0, 0)
        xmin, ymin, xmax, ymax = bounds
        left = int(math.floor(xmin * scale))
        top = int(math.floor(-ymax * scale))
        width = int(math.ceil(xmax * scale)) - left + 1
        height = int(math.ceil(-ymin * scale)) - top + 1

        def xf(pt):
            return (pt[0] * scale - left, -pt[1] * scale - top)

        pen = _FlattenPen(self._glyphset, xf)
        glyph.draw(pen)
        cov = rasterize_polygons(pen.contours, width, height)
        return GlyphBitmap(cov, left, top)


def _bounds(glyphset, name):
    pen = BoundsPen(glyphset)
    glyphset[name].draw(pen)
    return pen.bounds


@lru_cache(maxsize=8)
def load_font(size: int) -> MonoFont:
    """Shared font instance per pixel size; glyph caches are reused across pages."""
    return MonoFont(size)
