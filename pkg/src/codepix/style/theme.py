from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .lexer import TokenCategory

THEME_DIR = Path(__file__).resolve().parent.parent / "assets" / "themes"

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class StyledSpan:
    start: int
    end: int
    category: TokenCategory
    color: RGB


@dataclass(frozen=True)
class StyleTheme:
    name: str
    colors: dict[TokenCategory, RGB] = field(hash=False)
    background: RGB = (255, 255, 255)
    default_foreground: RGB = (0, 0, 0)

    def __post_init__(self):
        for cat, rgb in self.colors.items():
            if cat is not TokenCategory.WHITESPACE and tuple(rgb) == tuple(self.background):
                raise ValueError(f"theme {self.name!r}: {cat.value} color equals the background")
        if tuple(self.default_foreground) == tuple(self.background):
            raise ValueError(f"theme {self.name!r}: default foreground equals the background")

    def color_of(self, category: TokenCategory) -> RGB:
        if category is TokenCategory.WHITESPACE:
            return self.background
        return self.colors.get(category, self.default_foreground)

    @classmethod
    def from_dict(cls, data: dict) -> "StyleTheme":
        background = _rgb(data.get("background", (255, 255, 255)))
        cats = data.get("categories", {})
        default_fg = _rgb(data.get("default_foreground", cats.get("Default", (0, 0, 0))))
        colors = {TokenCategory(k): _rgb(v) for k, v in cats.items() if k != "Whitespace"}
        return cls(data["name"], colors, background, default_fg)

    @classmethod
    def load(cls, name_or_path: str | Path) -> "StyleTheme":
        """Load a shipped theme by name (``"default_light"``) or a JSON file path."""
        path = Path(name_or_path)
        if not path.suffix:
            path = THEME_DIR / f"{str(name_or_path).replace('-', '_')}.json"
        return cls.from_dict(json.loads(path.read_text("utf-8")))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "background": list(self.background),
            "default_foreground": list(self.default_foreground),
            "categories": {c.value: list(v) for c, v in self.colors.items()},
        }


def _rgb(value) -> RGB:
    r, g, b = (int(v) for v in value)
    for v in (r, g, b):
        if not 0 <= v <= 255:
            raise ValueError(f"color component out of range: {value!r}")
    return (r, g, b)


def apply_theme(spans, theme: StyleTheme, length: int | None = None) -> list[StyledSpan]:
    """Color lexed ``(start, end, category)`` spans.

    Gaps between spans (and up to ``length`` when given) are filled with
    Default spans so the result always covers the text.
    """
    out: list[StyledSpan] = []
    pos = 0
    for start, end, cat in sorted(spans, key=lambda s: s[0]):
        if start > pos:
            out.append(StyledSpan(pos, start, TokenCategory.DEFAULT, theme.color_of(TokenCategory.DEFAULT)))
        if end > start:
            out.append(StyledSpan(start, end, cat, theme.color_of(cat)))
        pos = max(pos, end)
    if length is not None and length > pos:
        out.append(StyledSpan(pos, length, TokenCategory.DEFAULT, theme.color_of(TokenCategory.DEFAULT)))
    return out
