"""Token categorization, color themes and bold synthesis."""

from .bold import BOLD_OFFSETS, bold_overdraw
from .lexer import (
    PLAIN_TEXT,
    LanguageRules,
    Registry,
    TokenCategory,
    UnknownLanguageError,
    default_registry,
    lex,
)
from .theme import StyledSpan, StyleTheme, apply_theme

__all__ = [
    "BOLD_OFFSETS",
    "PLAIN_TEXT",
    "LanguageRules",
    "Registry",
    "StyleTheme",
    "StyledSpan",
    "TokenCategory",
    "UnknownLanguageError",
    "apply_theme",
    "bold_overdraw",
    "default_registry",
    "lex",
]
