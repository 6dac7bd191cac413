"""Deterministic page layout and rasterization of source text."""

from .config import SUPPORTED_PATCH_SIZES, ConfigError, RenderConfig, Style
from .document import RenderManifest, render_document
from .font import MonoFont, load_font
from .layout import (
    LayoutOverflowError,
    PageLayout,
    columns_per_row,
    layout_document,
    normalize_source,
    split_lines,
)
from .png import PNGError, decode_png, encode_png
from .raster import PageImage, rasterize_page

__all__ = [
    "SUPPORTED_PATCH_SIZES",
    "ConfigError",
    "LayoutOverflowError",
    "MonoFont",
    "PNGError",
    "PageImage",
    "PageLayout",
    "RenderConfig",
    "RenderManifest",
    "Style",
    "columns_per_row",
    "decode_png",
    "encode_png",
    "layout_document",
    "load_font",
    "normalize_source",
    "rasterize_page",
    "render_document",
    "split_lines",
]
