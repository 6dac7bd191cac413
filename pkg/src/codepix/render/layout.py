from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ConfigError, RenderConfig
from .font import load_font

TAB = "    "


class LayoutOverflowError(ValueError):
    """A single source line needs more rows than a page holds."""

    def __init__(self, line_number: int, rows: int, capacity: int):
        super().__init__(
            f"line {line_number} wraps to {rows} rows but a page holds only {capacity}"
        )
        self.line_number = line_number
        self.rows = rows
        self.capacity = capacity


@dataclass(frozen=True)
class PageLayout:
    page_index: int
    line_start: int
    line_end: int
    rows: int
    cols: int
    wrap_events: int

    @property
    def line_range(self) -> range:
        return range(self.line_start, self.line_end)


def normalize_source(source: str) -> str:
    """Unify line endings to LF and expand each tab to four spaces."""
    return source.replace("\r\n", "\n").replace("\r", "\n").replace("\t", TAB)


def split_lines(text: str) -> list[str]:
    if not text:
        return []
    lines = text.split("\n")
    if text.endswith("\n"):
        lines.pop()
    return lines


def columns_per_row(config: RenderConfig) -> int:
    advance = load_font(config.font_size).advance
    cols = (config.base_width - 2 * config.margin_px) // advance
    if cols < 1:
        raise ConfigError("page too narrow for a single character at this font size")
    return cols


def rows_for_line(length: int, cols: int, wrap: bool) -> int:
    if not wrap or length <= cols:
        return 1
    return math.ceil(length / cols)


def layout_document(source: str, config: RenderConfig) -> list[PageLayout]:
    """Assign whole source lines to pages, in order.

    A wrapped line keeps all of its rows on one page; if it cannot fit on an
    empty page, :class:`LayoutOverflowError` names it (1-based).
    """
    lines = split_lines(normalize_source(source))
    capacity = config.lines_per_page
    cols = columns_per_row(config)
    pages: list[PageLayout] = []
    start, rows, wraps = 0, 0, 0
    for i, line in enumerate(lines):
        need = rows_for_line(len(line), cols, config.wrap_long_lines)
        if need > capacity:
            raise LayoutOverflowError(i + 1, need, capacity)
        if rows + need > capacity:
            pages.append(PageLayout(len(pages), start, i, rows, cols, wraps))
            start, rows, wraps = i, 0, 0
        rows += need
        wraps += need > 1
    pages.append(PageLayout(len(pages), start, len(lines), rows, cols, wraps))
    return pages
