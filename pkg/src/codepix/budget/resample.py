"""Separable bilinear (triangle-filter) downsampling.

The filter is the tent ``max(0, 1 - |d|)`` stretched by the reduction factor
so every source pixel contributes, the same geometry Pillow uses for its
BILINEAR reduction. Each output's taps are normalized and quantized to
16-bit fixed point (integers summing to exactly 2**16).

Rows are resampled first, then columns. Both passes run as BLAS matrix
products over narrow bands, but every operand is an integer, so they are exact
whatever order the additions happen in: the first pass stays below
255 * 2**16 < 2**24 (exact in float32), the second below 2**40 (exact in
float64). The result is rounded once, half up: ``(s + 2**31) >> 32``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..render.raster import PageImage

WEIGHT_BITS = 16
ONE = 1 << WEIGHT_BITS
CHUNK = 16  # outputs per band in the matrix products


class ResampleError(ValueError):
    pass


def _weights(n_in: int, n_out: int) -> list[tuple[int, list[int]]]:
    """Per output pixel: first source index and integer tap weights."""
    scale = n_in / n_out
    fscale = max(scale, 1.0)
    support = fscale
    out = []
    for x in range(n_out):
        center = (x + 0.5) * scale
        lo = max(0, int(math.floor(center - support + 0.5)))
        hi = min(n_in, int(math.floor(center + support + 0.5)))
        ws = [max(0.0, 1.0 - abs((i + 0.5 - center) / fscale)) for i in range(lo, hi)]
        total = math.fsum(ws)
        q = [int(math.floor(w / total * ONE + 0.5)) for w in ws]
        # the largest tap absorbs the quantization remainder
        q[q.index(max(q))] += ONE - sum(q)
        out.append((lo, q))
    return out


@lru_cache(maxsize=256)
def _matrices(n_in: int, n_out: int):
    """Band matrices: ``(out_start, out_end, in_start, in_end, M)`` with ``M[out, in]``."""
    taps = _weights(n_in, n_out)
    bands = []
    for a in range(0, n_out, CHUNK):
        b = min(a + CHUNK, n_out)
        lo = min(taps[x][0] for x in range(a, b))
        hi = max(taps[x][0] + len(taps[x][1]) for x in range(a, b))
        m = np.zeros((b - a, hi - lo), dtype=np.float64)
        for x in range(a, b):
            start, q = taps[x]
            m[x - a, start - lo : start - lo + len(q)] = q
        m.flags.writeable = False
        bands.append((a, b, lo, hi, m))
    return bands


def _pass(arr: np.ndarray, n_out: int, axis: int) -> np.ndarray:
    """Resample ``arr`` (channels, height, width) along ``axis`` (1 or 2)."""
    c, h, w = arr.shape
    if axis == 2:
        # 2-D slices keep the products on the BLAS fast path
        flat = arr.reshape(c * h, w)
        out = np.empty((c * h, n_out), dtype=arr.dtype)
        for a, b, lo, hi, m in _matrices(w, n_out):
            out[:, a:b] = flat[:, lo:hi] @ m.T.astype(arr.dtype)
        return out.reshape(c, h, n_out)
    out = np.empty((c, n_out, w), dtype=arr.dtype)
    for a, b, lo, hi, m in _matrices(h, n_out):
        m = m.astype(arr.dtype)
        for ch in range(c):
            out[ch, a:b, :] = m @ arr[ch, lo:hi, :]
    return out


def _rows_pass(src: np.ndarray, n_out: int) -> np.ndarray:
    """Horizontal pass of a (height, width, 3) uint8 image, as (3, height, n_out) float64.

    A row of one gray level (blank page background, typically) maps to that
    level times ``ONE`` exactly because the weights sum to ``ONE``, so only the
    other rows go through the products.
    """
    h = src.shape[0]
    rows = src.reshape(h, -1)
    lo, hi = rows.min(axis=1), rows.max(axis=1)
    flat_rows = lo == hi
    busy = np.flatnonzero(~flat_rows)
    out = np.empty((3, h, n_out), dtype=np.float64)
    out[:, flat_rows, :] = (lo[flat_rows].astype(np.float64) * ONE)[None, :, None]
    if busy.size:
        part = np.moveaxis(src[busy], 2, 0).astype(np.float32, order="C")
        out[:, busy, :] = _pass(part, n_out, axis=2)
    return out


def downsample_bilinear(image: PageImage, target_width: int, target_height: int) -> PageImage:
    """Shrink ``image`` to exactly ``target_width x target_height``.

    Upscaling is refused; this is a compression step only.
    """
    if target_width < 1 or target_height < 1:
        raise ResampleError("target dimensions must be at least 1 pixel")
    if target_width > image.width or target_height > image.height:
        raise ResampleError(
            f"refusing to upscale {image.width}x{image.height} to {target_width}x{target_height}"
        )
    src = image.pixels
    if (target_width, target_height) == (image.width, image.height):
        return PageImage(src.copy(), image.layout, image.warnings)
    shift = 0
    if target_width != image.width:
        arr = _rows_pass(src, target_width)
        shift += WEIGHT_BITS
    else:
        arr = np.moveaxis(src, 2, 0).astype(np.float64, order="C")
    if target_height != image.height:
        arr = _pass(arr, target_height, axis=1)
        shift += WEIGHT_BITS
    total = arr.astype(np.int64)
    rounded = (total + (1 << (shift - 1))) >> shift
    out = np.clip(rounded, 0, 255).astype(np.uint8)
    return PageImage(np.ascontiguousarray(np.moveaxis(out, 0, 2)), image.layout, image.warnings)
