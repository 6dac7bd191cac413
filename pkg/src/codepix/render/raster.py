"""Page rasterization.

Glyph coverage is composited into one 8-bit ink plane. Where glyph boxes
overlap, the larger coverage wins, and its span color with it. The ink plane
is then blended over the background per channel with integer arithmetic::

    out = (background * (255 - ink) + color * ink + 127) // 255
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..style.bold import bold_overdraw
from ..style.theme import StyledSpan
from .config import RenderConfig, Style
from .font import GlyphBitmap, MonoFont, load_font
from .layout import PageLayout, normalize_source, split_lines

BACKGROUND = (255, 255, 255)
FOREGROUND = (0, 0, 0)


@dataclass(frozen=True, eq=False)
class PageImage:
    pixels: np.ndarray  # (height, width, 3) uint8
    layout: PageLayout | None = None
    warnings: tuple[str, ...] = field(default=())

    channels = 3

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def pixel_data(self) -> bytes:
        return np.ascontiguousarray(self.pixels, dtype=np.uint8).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int, layout=None) -> "PageImage":
        if len(data) != width * height * 3:
            raise ValueError("pixel buffer length does not match width x height x 3")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3).copy()
        return cls(arr, layout)


_bold_cache: dict[tuple[int, str], GlyphBitmap] = {}


def _glyph(font: MonoFont, ch: str, bold: bool) -> GlyphBitmap:
    g = font.glyph(ch)
    if not bold:
        return g
    key = (font.size, ch)
    b = _bold_cache.get(key)
    if b is None:
        b = GlyphBitmap(bold_overdraw(g.coverage), g.left, g.top)
        _bold_cache[key] = b
    return b


def baseline_offset(config: RenderConfig, font: MonoFont) -> int:
    """Baseline distance from the top of a text row, half-leading centered."""
    leading = config.row_height - (font.ascent + font.descent)
    return int(np.floor(leading / 2 + font.ascent + 0.5))


def rasterize_page(
    source: str,
    layout: PageLayout,
    styled_spans: list[StyledSpan] | None,
    config: RenderConfig,
    background=BACKGROUND,
) -> PageImage:
    """Draw the lines of one page onto a ``base_width x base_height`` canvas.

    ``styled_spans`` index into the normalized source text (see
    :func:`~codepix.render.layout.normalize_source`). Without spans every
    glyph uses the default foreground.
    """
    text = normalize_source(source)
    lines = split_lines(text)
    font = load_font(config.font_size)
    W, H = config.base_width, config.base_height
    margin = config.margin_px
    adv = font.advance
    cols = layout.cols
    base = baseline_offset(config, font)
    bold = config.style is Style.BOLD

    # character offset of each line start
    offsets = [0] * (len(lines) + 1)
    pos = 0
    for i, line in enumerate(lines):
        offsets[i] = pos
        pos += len(line) + 1
    offsets[len(lines)] = pos

    palette = [tuple(FOREGROUND)]
    char_color = None
    if styled_spans:
        lo = offsets[layout.line_start] if layout.line_start < len(lines) else len(text)
        hi = offsets[layout.line_end] if layout.line_end <= len(lines) else len(text)
        char_color = np.zeros(max(hi - lo, 0), dtype=np.uint8)
        index: dict[tuple[int, int, int], int] = {tuple(FOREGROUND): 0}
        for span in styled_spans:
            a, b = max(span.start, lo), min(span.end, hi)
            if b <= a:
                continue
            color = tuple(span.color)
            if color not in index:
                index[color] = len(palette)
                palette.append(color)
            char_color[a - lo : b - lo] = index[color]
        if len(palette) > 255:
            raise ValueError("too many distinct span colors on one page")
    multicolor = len(palette) > 1

    ink = np.zeros((H, W), dtype=np.uint8)
    cidx = np.zeros((H, W), dtype=np.uint8) if multicolor else None
    warnings: list[str] = []
    missing_seen: set[str] = set()

    row = 0
    page_lo = offsets[layout.line_start] if layout.line_start < len(lines) else 0
    for li in layout.line_range:
        line = lines[li]
        if config.wrap_long_lines:
            segments = [line[k : k + cols] for k in range(0, len(line), cols)] or [""]
        else:
            segments = [line[:cols]]
            if len(line) > cols:
                warnings.append(f"line {li + 1} clipped at column {cols}")
        for seg_i, seg in enumerate(segments):
            top = config.row_top(row) + base
            seg_off = offsets[li] + seg_i * cols - page_lo
            for c, ch in enumerate(seg):
                if ch.isspace():
                    continue
                if not font.has_glyph(ch) and ch not in missing_seen:
                    missing_seen.add(ch)
                    warnings.append(
                        f"U+{ord(ch):04X} on line {li + 1} is not in the bundled font; "
                        "replacement glyph drawn"
                    )
                g = _glyph(font, ch, bold)
                cov = g.coverage
                if cov.size == 0:
                    continue
                x0 = margin + c * adv + g.left
                y0 = top + g.top
                gh, gw = cov.shape
                xa, ya = max(x0, 0), max(y0, 0)
                xb, yb = min(x0 + gw, W), min(y0 + gh, H)
                if xb <= xa or yb <= ya:
                    continue
                sub = cov[ya - y0 : yb - y0, xa - x0 : xb - x0]
                region = ink[ya:yb, xa:xb]
                if multicolor:
                    col = int(char_color[seg_off + c])
                    cregion = cidx[ya:yb, xa:xb]
                    cregion[sub > region] = col
                np.maximum(region, sub, out=region)
            row += 1

    pixels = _composite(ink, cidx, palette, background)
    return PageImage(pixels, layout, tuple(warnings))


def _composite(ink, cidx, palette, background) -> np.ndarray:
    # the blend formula tabulated for every (palette color, ink level) pair;
    # only inked pixels are looked up, the rest stay background
    a = np.arange(256, dtype=np.int32)[None, :, None]
    pal = np.array(palette, dtype=np.int32)[:, None, :]
    bg = np.array(background, dtype=np.int32)[None, None, :]
    lut = ((bg * (255 - a) + pal * a + 127) // 255).astype(np.uint8).reshape(-1, 3)
    H, W = ink.shape
    if len(set(background)) == 1:
        out = np.full((H, W, 3), background[0], dtype=np.uint8)  # a plain memset
    else:
        out = np.empty((H, W, 3), dtype=np.uint8)
        out[...] = background
    nz = np.flatnonzero(ink)
    index = ink.ravel()[nz].astype(np.intp)
    if cidx is not None:
        index |= cidx.ravel()[nz].astype(np.intp) << 8
    out.reshape(-1, 3)[nz] = lut[index]
    return out
