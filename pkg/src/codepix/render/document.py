from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..style.lexer import PLAIN_TEXT, Registry, UnknownLanguageError, default_registry, lex
from ..style.theme import StyleTheme, apply_theme
from .config import RenderConfig, Style
from .layout import layout_document, normalize_source
from .raster import BACKGROUND, PageImage, rasterize_page


@dataclass
class RenderManifest:
    style: str
    font_size: int
    language: str
    pages: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def page_count(self) -> int:
        return len(self.pages)

    def to_dict(self) -> dict:
        return {
            "pages": self.pages,
            "style": self.style,
            "font_size": self.font_size,
            "language": self.language,
            "warnings": self.warnings,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def render_document(
    source: str,
    config: RenderConfig | None = None,
    language: str = PLAIN_TEXT,
    *,
    registry: Registry | None = None,
    theme: StyleTheme | None = None,
    jobs: int = 1,
) -> tuple[list[PageImage], RenderManifest]:
    """Lay out, lex and rasterize a document into ordered pages.

    Unknown languages fall back to plain text and leave a note in the
    manifest. Raises :class:`~codepix.render.layout.LayoutOverflowError` when
    a single line cannot fit on a page.
    """
    config = config or RenderConfig()
    registry = registry or default_registry()
    text = normalize_source(source)
    notes: list[str] = []

    if language != PLAIN_TEXT and language not in registry:
        notes.append(f"language {language!r} has no lexer; rendered as {PLAIN_TEXT}")
        language = PLAIN_TEXT

    layouts = layout_document(text, config)

    spans = None
    background = BACKGROUND
    if config.style is Style.HIGHLIGHT:
        theme = theme or StyleTheme.load(config.theme)
        background = theme.background
        try:
            lexed = lex(text, language, registry)
        except UnknownLanguageError:  # pragma: no cover - guarded above
            lexed = lex(text, PLAIN_TEXT)
        spans = apply_theme(lexed, theme, len(text))

    def draw(layout):
        return rasterize_page(text, layout, spans, config, background)

    if jobs > 1 and len(layouts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pages = list(pool.map(draw, layouts))
    else:
        pages = [draw(lay) for lay in layouts]

    manifest = RenderManifest(config.style.value, config.font_size, language, notes=notes)
    for page in pages:
        lay = page.layout
        manifest.pages.append(
            {
                "index": lay.page_index,
                "line_start": lay.line_start,
                "line_end": lay.line_end,
                "width": page.width,
                "height": page.height,
                "wrap_events": lay.wrap_events,
            }
        )
        manifest.warnings.extend(f"page {lay.page_index}: {w}" for w in page.warnings)
    return pages, manifest
