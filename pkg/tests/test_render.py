from __future__ import annotations

import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from codepix.render import (
    ConfigError,
    LayoutOverflowError,
    PageImage,
    RenderConfig,
    decode_png,
    encode_png,
    layout_document,
    load_font,
    render_document,
)
from codepix.render.font import rasterize_polygons
from codepix.render.layout import normalize_source, split_lines
from codepix.render.png import PNGError

SMALL = dict(base_width=448, base_height=448, font_size=16)


def numbered(n: int) -> str:
    return "".join(f"x = {i}\n" for i in range(n))


# --- geometry -------------------------------------------------------------

def test_default_geometry():
    cfg = RenderConfig()
    assert cfg.margin_px == 22
    assert cfg.lines_per_page == 54
    assert load_font(40).advance == 24
    assert layout_document("a\n", cfg)[0].cols == 91


def test_config_rejects_bad_base():
    with pytest.raises(ConfigError):
        RenderConfig(base_width=2250)
    with pytest.raises(ConfigError):
        RenderConfig(font_size=0)
    with pytest.raises(ValueError):
        RenderConfig(style="italic")


def test_layout_examples():
    cfg = RenderConfig()
    one = layout_document(numbered(54), cfg)
    assert len(one) == 1 and one[0].rows == 54
    two = layout_document(numbered(55), cfg)
    assert [(p.line_start, p.line_end) for p in two] == [(0, 54), (54, 55)]
    assert len(layout_document(numbered(120), cfg)) == 3
    empty = layout_document("", cfg)
    assert len(empty) == 1 and empty[0].rows == 0 and empty[0].line_range == range(0)


def test_wrapped_line_stays_on_one_page():
    cfg = RenderConfig()
    src = numbered(53) + "y" * 200 + "\n"  # 3 rows, only 1 left on page 0
    pages = layout_document(src, cfg)
    assert [(p.line_start, p.line_end) for p in pages] == [(0, 53), (53, 54)]
    assert pages[1].rows == 3 and pages[1].wrap_events == 1


def test_overflow_names_line():
    cfg = RenderConfig(**SMALL)
    cols = layout_document("a", cfg)[0].cols
    src = "ok\n" + "z" * (cols * (cfg.lines_per_page + 1)) + "\n"
    with pytest.raises(LayoutOverflowError) as err:
        layout_document(src, cfg)
    assert err.value.line_number == 2


def test_no_wrap_clips_with_warning():
    cfg = RenderConfig(wrap_long_lines=False, **SMALL)
    pages, manifest = render_document("q" * 500 + "\n", cfg)
    assert pages[0].layout.rows == 1
    assert any("clipped" in w for w in manifest.warnings)


def test_normalization():
    assert normalize_source("a\tb\r\nc\rd") == "a    b\nc\nd"
    assert split_lines("a\nb\n") == ["a", "b"]
    assert split_lines("a\n\n") == ["a", ""]
    assert split_lines("") == []


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 300), min_size=0, max_size=200))
def test_pagination_partitions(lengths):
    cfg = RenderConfig()
    src = "".join("w" * n + "\n" for n in lengths)
    pages = layout_document(src, cfg)
    covered = [i for p in pages for i in p.line_range]
    assert covered == list(range(len(lengths)))
    assert all(p.rows <= cfg.lines_per_page for p in pages)
    assert [p.page_index for p in pages] == list(range(len(pages)))


# --- rasterizer -----------------------------------------------------------

def test_rasterize_square_exact():
    sq = [[(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)]]
    cov = rasterize_polygons(sq, 4, 4)
    expect = np.zeros((4, 4), np.uint8)
    expect[1:3, 1:3] = 255
    assert np.array_equal(cov, expect)


def test_rasterize_half_pixel_coverage():
    sq = [[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)]]
    assert rasterize_polygons(sq, 1, 1)[0, 0] == 128


def test_rasterize_winding_direction_irrelevant():
    cw = [[(0, 0), (2, 0), (2, 2), (0, 2)]]
    ccw = [list(reversed(cw[0]))]
    assert np.array_equal(rasterize_polygons(cw, 3, 3), rasterize_polygons(ccw, 3, 3))


def test_glyph_cache_and_notdef():
    font = load_font(40)
    assert font.glyph("A") is font.glyph("A")
    assert font.has_glyph("A") and not font.has_glyph("\U0001F600")
    assert font.glyph("\U0001F600").coverage.any()


def test_monospace_grid():
    cfg = RenderConfig(**SMALL)
    pages, _ = render_document("||||\n", cfg)
    adv = load_font(cfg.font_size).advance
    ink = 255 - pages[0].pixels[..., 0].astype(int)
    cols = ink.sum(axis=0)
    centers = []
    for k in range(4):
        x0 = cfg.margin_px + k * adv
        seg = cols[x0 : x0 + adv]
        centers.append(x0 + (seg * np.arange(adv)).sum() / seg.sum())
    gaps = np.diff(centers)
    assert np.allclose(gaps, adv)


def test_render_deterministic_and_sized():
    src = "def f(x):\n    return x + 1\n"
    a, _ = render_document(src, RenderConfig(), "python")
    b, _ = render_document(src, RenderConfig(), "python")
    assert a[0].pixels.shape == (2240, 2240, 3)
    assert encode_png(a[0]) == encode_png(b[0])


def test_parallel_pages_identical():
    cfg = RenderConfig(**SMALL)
    src = numbered(80)
    seq, _ = render_document(src, cfg, jobs=1)
    par, _ = render_document(src, cfg, jobs=4)
    assert len(seq) > 1
    assert [encode_png(p) for p in seq] == [encode_png(p) for p in par]


def test_bold_has_more_ink():
    src = "int main() { return 0; }\n"
    plain, _ = render_document(src, RenderConfig(style="plain", **SMALL), "c")
    bold, _ = render_document(src, RenderConfig(style="bold", **SMALL), "c")
    ink_p = (plain[0].pixels < 255).sum()
    ink_b = (bold[0].pixels < 255).sum()
    assert ink_b > ink_p
    # every plain ink pixel is at least as dark in bold
    assert (bold[0].pixels <= plain[0].pixels).all()


def test_highlight_colors_and_identity():
    src = "def f(x):  # note\n    return 'ok'\n"
    hi, _ = render_document(src, RenderConfig(style="highlight", **SMALL), "python")
    colors = {tuple(c) for c in hi[0].pixels.reshape(-1, 3)}
    # keyword blue and comment green both appear at full strength
    assert (0, 0, 255) in colors and (0, 128, 0) in colors
    plain_theme, _ = render_document(
        src, RenderConfig(style="highlight", theme="plain", **SMALL), "python"
    )
    plain, _ = render_document(src, RenderConfig(style="plain", **SMALL), "python")
    assert np.array_equal(plain_theme[0].pixels, plain[0].pixels)


def test_unknown_language_falls_back():
    pages, manifest = render_document("+++.", RenderConfig(style="highlight", **SMALL), "brainfuck")
    assert manifest.language == "plain-text"
    assert manifest.notes and "brainfuck" in manifest.notes[0]
    assert len(pages) == 1


def test_missing_glyph_warning():
    _, manifest = render_document("x = '\U0001F600'\n", RenderConfig(**SMALL))
    assert any("U+1F600" in w for w in manifest.warnings)


def test_manifest_json():
    _, manifest = render_document(numbered(60), RenderConfig(), "python")
    doc = json.loads(manifest.to_json())
    assert [p["line_start"] for p in doc["pages"]] == [0, 54]
    assert doc["style"] == "plain" and doc["font_size"] == 40


def test_empty_source_blank_page():
    pages, _ = render_document("", RenderConfig(**SMALL))
    assert len(pages) == 1 and (pages[0].pixels == 255).all()


# --- PNG ------------------------------------------------------------------

def test_png_roundtrip_pillow():
    pages, _ = render_document("hello\n", RenderConfig(style="highlight", **SMALL), "python")
    data = encode_png(pages[0])
    with Image.open(io.BytesIO(data)) as im:
        assert im.mode == "RGB" and im.size == (448, 448)
        assert np.array_equal(np.asarray(im), pages[0].pixels)
    assert np.array_equal(decode_png(data).pixels, pages[0].pixels)


def test_png_one_pixel_and_random():
    rng = np.random.default_rng(1)
    for shape in [(1, 1, 3), (7, 5, 3), (33, 64, 3)]:
        img = PageImage(rng.integers(0, 256, shape, dtype=np.uint8))
        data = encode_png(img)
        assert np.array_equal(np.asarray(Image.open(io.BytesIO(data))), img.pixels)
        assert np.array_equal(decode_png(data).pixels, img.pixels)


def test_decode_pillow_filters():
    rng = np.random.default_rng(2)
    arr = (rng.integers(0, 256, (20, 30, 3))).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG", optimize=True)
    assert np.array_equal(decode_png(buf.getvalue()).pixels, arr)


def test_decode_rejects_garbage():
    with pytest.raises(PNGError):
        decode_png(b"not a png")


def test_page_from_bytes():
    img = PageImage.from_bytes(bytes(range(12)), 2, 2)
    assert img.width == 2 and img.height == 2 and img.pixel_data == bytes(range(12))
