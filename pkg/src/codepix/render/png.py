"""Minimal deterministic PNG codec for 8-bit RGB pages.

Encoding always uses the Sub filter on every scanline and zlib level 6, so
the same pixels always produce the same bytes under a given zlib build.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .raster import PageImage

SIGNATURE = b"\x89PNG\r\n\x1a\n"
COMPRESSION_LEVEL = 6


class PNGError(ValueError):
    pass


def _chunk(kind: bytes, data: bytes) -> bytes:
    crc = zlib.crc32(kind + data) & 0xFFFFFFFF
    return struct.pack(">I", len(data)) + kind + data + struct.pack(">I", crc)


def encode_png(image: PageImage) -> bytes:
    px = np.ascontiguousarray(image.pixels, dtype=np.uint8)
    if px.ndim != 3 or px.shape[2] != 3:
        raise PNGError("expected an (H, W, 3) RGB image")
    h, w, _ = px.shape
    if h == 0 or w == 0:
        raise PNGError("cannot encode an empty image")
    rows = px.reshape(h, w * 3)
    filtered = np.empty((h, w * 3 + 1), dtype=np.uint8)
    filtered[:, 0] = 1  # Sub
    filtered[:, 1:4] = rows[:, :3]
    filtered[:, 4:] = rows[:, 3:] - rows[:, :-3]  # uint8 wraps mod 256
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    idat = zlib.compress(filtered.tobytes(), COMPRESSION_LEVEL)
    return SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def decode_png(data: bytes) -> PageImage:
    """Decode a non-interlaced 8-bit RGB PNG (any scanline filter)."""
    if not data.startswith(SIGNATURE):
        raise PNGError("not a PNG file")
    pos = len(SIGNATURE)
    header = None
    idat = bytearray()
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        kind = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        (crc,) = struct.unpack(">I", data[pos + 8 + length : pos + 12 + length])
        if zlib.crc32(kind + body) & 0xFFFFFFFF != crc:
            raise PNGError(f"CRC mismatch in {kind!r} chunk")
        if kind == b"IHDR":
            header = struct.unpack(">IIBBBBB", body)
        elif kind == b"IDAT":
            idat += body
        elif kind == b"IEND":
            break
        pos += 12 + length
    if header is None:
        raise PNGError("missing IHDR")
    w, h, depth, ctype, _, _, interlace = header
    if depth != 8 or ctype != 2 or interlace != 0:
        raise PNGError("only 8-bit RGB non-interlaced PNGs are supported")
    raw = np.frombuffer(zlib.decompress(bytes(idat)), dtype=np.uint8)
    stride = w * 3
    raw = raw.reshape(h, stride + 1)
    out = np.zeros((h, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(h):
        ftype, line = raw[y, 0], raw[y, 1:]
        if ftype == 0:
            cur = line.copy()
        elif ftype == 1:
            cur = np.cumsum(line.reshape(w, 3), axis=0, dtype=np.uint8).reshape(stride)
        elif ftype == 2:
            cur = line + prev
        elif ftype in (3, 4):
            cur = _unfilter_slow(int(ftype), line, prev)
        else:
            raise PNGError(f"bad filter type {ftype}")
        out[y] = cur
        prev = cur
    return PageImage(out.reshape(h, w, 3))


def _unfilter_slow(ftype: int, line: np.ndarray, prev: np.ndarray) -> np.ndarray:
    cur = bytearray(len(line))
    up = prev.tolist()
    for i, v in enumerate(line.tolist()):
        left = cur[i - 3] if i >= 3 else 0
        if ftype == 3:
            cur[i] = (v + (left + up[i]) // 2) & 0xFF
        else:
            ul = up[i - 3] if i >= 3 else 0
            p = left + up[i] - ul
            pa, pb, pc = abs(p - left), abs(p - up[i]), abs(p - ul)
            pred = left if pa <= pb and pa <= pc else (up[i] if pb <= pc else ul)
            cur[i] = (v + pred) & 0xFF
    return np.frombuffer(bytes(cur), dtype=np.uint8)
