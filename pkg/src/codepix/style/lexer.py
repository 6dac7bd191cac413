"""Rule-based lexers driven by per-language JSON tables.

Every language shares one scanner; a table supplies keywords, comment and
string delimiters and the operator/punctuation alphabets. Adding a language
means dropping a JSON file into ``assets/lexers``.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

LEXER_DIR = Path(__file__).resolve().parent.parent / "assets" / "lexers"
PLAIN_TEXT = "plain-text"


class TokenCategory(str, enum.Enum):
    KEYWORD = "Keyword"
    IDENTIFIER = "Identifier"
    STRING = "String"
    NUMBER = "Number"
    COMMENT = "Comment"
    OPERATOR = "Operator"
    PUNCTUATION = "Punctuation"
    WHITESPACE = "Whitespace"
    DEFAULT = "Default"


class UnknownLanguageError(KeyError):
    def __init__(self, language: str):
        super().__init__(language)
        self.language = language

    def __str__(self) -> str:
        return (
            f"no lexer registered for {self.language!r}; "
            f"use language {PLAIN_TEXT!r} to render without highlighting"
        )


@dataclass(frozen=True)
class LanguageRules:
    name: str
    keywords: frozenset[str]
    line_comment: tuple[str, ...] = ()
    block_comment: tuple[tuple[str, str], ...] = ()
    strings: tuple[str, ...] = ()
    multiline_strings: frozenset[str] = frozenset()
    string_prefix_chars: str = ""
    operators: str = ""
    punctuation: str = ""
    directive_prefix: str | None = None
    extensions: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()

    @classmethod
    def from_json(cls, data: dict) -> "LanguageRules":
        return cls(
            name=data["name"],
            keywords=frozenset(data.get("keywords", ())),
            line_comment=tuple(data.get("line_comment", ())),
            block_comment=tuple(tuple(p) for p in data.get("block_comment", ())),
            # longest delimiter first so '"""' wins over '"'
            strings=tuple(sorted(data.get("strings", ()), key=len, reverse=True)),
            multiline_strings=frozenset(data.get("multiline_strings", ())),
            string_prefix_chars=data.get("string_prefix_chars", ""),
            operators=data.get("operators", ""),
            punctuation=data.get("punctuation", ""),
            directive_prefix=data.get("directive_prefix"),
            extensions=tuple(data.get("extensions", ())),
            aliases=tuple(data.get("aliases", ())),
        )


_NUMBER = re.compile(
    r"(?:0[xX][0-9a-fA-F_]+|0[bB][01_]+|0[oO][0-7_]+"
    r"|\d[\d_]*(?:\.\d[\d_]*)?(?:[eE][+-]?\d+)?|\.\d[\d_]*(?:[eE][+-]?\d+)?)"
    r"[A-Za-z]*"
)
_IDENT = re.compile(r"[^\W\d]\w*")
_WS = re.compile(r"\s+")
_DIRECTIVE_WORD = re.compile(r"[ \t]*\w+")


class Registry:
    """Immutable mapping from language names, aliases and extensions to rules."""

    def __init__(self, rules: list[LanguageRules]):
        self._by_name: dict[str, LanguageRules] = {}
        self._by_ext: dict[str, str] = {}
        for r in rules:
            for key in (r.name, *r.aliases):
                self._by_name[key.lower()] = r
            for ext in r.extensions:
                self._by_ext[ext.lower()] = r.name

    @classmethod
    def from_directory(cls, directory: Path = LEXER_DIR) -> "Registry":
        rules = []
        for path in sorted(directory.glob("*.json")):
            rules.append(LanguageRules.from_json(json.loads(path.read_text("utf-8"))))
        return cls(rules)

    def get(self, language: str) -> LanguageRules:
        try:
            return self._by_name[language.lower()]
        except KeyError:
            raise UnknownLanguageError(language) from None

    def __contains__(self, language: str) -> bool:
        return language.lower() in self._by_name or language == PLAIN_TEXT

    def languages(self) -> list[str]:
        return sorted({r.name for r in self._by_name.values()})

    def language_for_path(self, path: str | Path) -> str:
        return self._by_ext.get(Path(path).suffix.lower(), PLAIN_TEXT)

    def extensions(self) -> list[str]:
        return sorted(self._by_ext)


@lru_cache(maxsize=1)
def default_registry() -> Registry:
    return Registry.from_directory()


def lex(source: str, language: str, registry: Registry | None = None):
    """Split ``source`` into ``(start, end, TokenCategory)`` spans.

    Spans are ordered, contiguous and cover every character. Raises
    :class:`UnknownLanguageError` for languages missing from the registry;
    ``"plain-text"`` is always accepted.
    """
    if language == PLAIN_TEXT:
        return _lex_plain(source)
    rules = (registry or default_registry()).get(language)
    return _merge(_scan(source, rules))


def _lex_plain(source: str):
    spans = []
    for m in re.finditer(r"\s+|\S+", source):
        cat = TokenCategory.WHITESPACE if m.group().isspace() else TokenCategory.DEFAULT
        spans.append((m.start(), m.end(), cat))
    return spans


def _scan(src: str, rules: LanguageRules):
    n = len(src)
    i = 0
    line_start = True
    out: list[tuple[int, int, TokenCategory]] = []
    while i < n:
        ch = src[i]
        if ch.isspace():
            j = _WS.match(src, i).end()
            out.append((i, j, TokenCategory.WHITESPACE))
            if "\n" in src[i:j]:
                line_start = True
            i = j
            continue

        at_line_start, line_start = line_start, False

        end = _match_comment(src, i, rules)
        if end is not None:
            out.append((i, end, TokenCategory.COMMENT))
            i = end
            continue

        end = _match_string(src, i, rules)
        if end is not None:
            out.append((i, end, TokenCategory.STRING))
            i = end
            continue

        if rules.directive_prefix and at_line_start and src.startswith(rules.directive_prefix, i):
            m = _DIRECTIVE_WORD.match(src, i + len(rules.directive_prefix))
            if m:
                out.append((i, m.end(), TokenCategory.KEYWORD))
                i = m.end()
                continue

        m = _NUMBER.match(src, i) if (ch.isdigit() or ch == ".") else None
        if m:
            out.append((i, m.end(), TokenCategory.NUMBER))
            i = m.end()
            continue

        m = _IDENT.match(src, i)
        if m:
            word = m.group()
            cat = TokenCategory.KEYWORD if word in rules.keywords else TokenCategory.IDENTIFIER
            out.append((i, m.end(), cat))
            i = m.end()
            continue

        if ch in rules.operators:
            cat = TokenCategory.OPERATOR
        elif ch in rules.punctuation:
            cat = TokenCategory.PUNCTUATION
        else:
            cat = TokenCategory.DEFAULT
        out.append((i, i + 1, cat))
        i += 1
    return out


def _match_comment(src: str, i: int, rules: LanguageRules) -> int | None:
    for opener, closer in rules.block_comment:
        if src.startswith(opener, i):
            j = src.find(closer, i + len(opener))
            return len(src) if j < 0 else j + len(closer)
    for prefix in rules.line_comment:
        if src.startswith(prefix, i):
            j = src.find("\n", i)
            return len(src) if j < 0 else j
    return None


def _match_string(src: str, i: int, rules: LanguageRules) -> int | None:
    j = i
    while j < len(src) and j - i < 3 and src[j] in rules.string_prefix_chars:
        j += 1
    for delim in rules.strings:
        if src.startswith(delim, j):
            return _string_end(src, j + len(delim), delim, delim in rules.multiline_strings)
    return None


def _string_end(src: str, i: int, delim: str, multiline: bool) -> int:
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "\n" and not multiline:
            return i
        if src.startswith(delim, i):
            return i + len(delim)
        i += 1
    return n


_MERGEABLE = {
    TokenCategory.OPERATOR,
    TokenCategory.PUNCTUATION,
    TokenCategory.WHITESPACE,
    TokenCategory.DEFAULT,
}


def _merge(spans):
    merged: list[tuple[int, int, TokenCategory]] = []
    for start, end, cat in spans:
        if merged and cat in _MERGEABLE and merged[-1][2] is cat and merged[-1][1] == start:
            merged[-1] = (merged[-1][0], end, cat)
        else:
            merged.append((start, end, cat))
    return merged
