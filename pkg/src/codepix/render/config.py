from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

SUPPORTED_PATCH_SIZES = (14, 16)


class Style(str, enum.Enum):
    PLAIN = "plain"
    BOLD = "bold"
    HIGHLIGHT = "highlight"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RenderConfig:
    """Page geometry and styling for rendering.

    Defaults reproduce the reference setup: a 2240x2240 page, 40 px text,
    line height 1.0 and a 1% margin on each side.
    """

    base_width: int = 2240
    base_height: int = 2240
    font_size: int = 40
    line_height_multiplier: float = 1.0
    margin_fraction: float = 0.01
    style: Style = Style.PLAIN
    wrap_long_lines: bool = True
    theme: str = "default_light"

    def __post_init__(self):
        object.__setattr__(self, "style", Style(self.style))
        if self.base_width <= 0 or self.base_height <= 0:
            raise ConfigError("base dimensions must be positive")
        for p in SUPPORTED_PATCH_SIZES:
            if self.base_width % p or self.base_height % p:
                raise ConfigError(
                    f"base {self.base_width}x{self.base_height} is not divisible by patch size {p}"
                )
        if self.font_size <= 0:
            raise ConfigError("font_size must be positive")
        if not self.line_height_multiplier > 0:
            raise ConfigError("line_height_multiplier must be positive")
        if not 0 <= self.margin_fraction < 0.5:
            raise ConfigError("margin_fraction must be in [0, 0.5)")

    @property
    def margin_px(self) -> int:
        # round half up; applied to all four sides
        return int(math.floor(self.margin_fraction * self.base_width + 0.5))

    @property
    def row_height(self) -> float:
        return self.font_size * self.line_height_multiplier

    @property
    def lines_per_page(self) -> int:
        return int((self.base_height - 2 * self.margin_px) // self.row_height)

    def row_top(self, row: int) -> int:
        return self.margin_px + int(math.floor(row * self.row_height + 0.5))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["style"] = self.style.value
        return d
