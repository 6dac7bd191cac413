"""Text token counting.

The builtin rule (``builtin-v1``) scans left to right and emits one token per

* maximal whitespace run,
* identifier (a letter or underscore followed by letters, digits, underscores),
* number (digits with an optional ``.digits`` fraction),
* any other single character (operators and punctuation count one each).

So ``"def f(x):"`` is ``def`` ``␠`` ``f`` ``(`` ``x`` ``)`` ``:`` = 7 tokens.

An external vocabulary can stand in for a model tokenizer: either a
HuggingFace ``tokenizer.json`` (needs the ``tokenizers`` package) or a plain
text file with one vocabulary entry per line, applied by greedy
longest-match with one token per unmatched character.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

BUILTIN_RULE_VERSION = "builtin-v1"

_TOKEN = re.compile(r"\s+|[^\W\d]\w*|\d+(?:\.\d+)?|.", re.DOTALL)


class TokenizerError(ValueError):
    pass


class TokenizerKind(str, enum.Enum):
    BUILTIN = "builtin"
    EXTERNAL_VOCAB = "external-vocab"


@dataclass(frozen=True)
class TokenizerSpec:
    kind: TokenizerKind = TokenizerKind.BUILTIN
    vocab_source: str | None = None
    rule_version: str = BUILTIN_RULE_VERSION

    def __post_init__(self):
        object.__setattr__(self, "kind", TokenizerKind(self.kind))
        if self.kind is TokenizerKind.EXTERNAL_VOCAB and not self.vocab_source:
            raise TokenizerError("external-vocab tokenizer needs a vocab_source path")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "vocab_source": self.vocab_source, "rule_version": self.rule_version}

    @classmethod
    def from_dict(cls, data: dict | None) -> "TokenizerSpec":
        return cls(**data) if data else cls()


BUILTIN = TokenizerSpec()


def tokenize(text: str, spec: TokenizerSpec = BUILTIN) -> list[str]:
    """Split ``text`` into tokens; concatenating them gives ``text`` back for the builtin rule."""
    if spec.kind is TokenizerKind.BUILTIN:
        return _TOKEN.findall(text)
    return _external(spec.vocab_source)(text)


def count_text_tokens(text: str, spec: TokenizerSpec = BUILTIN) -> int:
    if not text:
        return 0
    return len(tokenize(text, spec))


def content_tokens(text: str, spec: TokenizerSpec = BUILTIN) -> list[str]:
    """Tokens with whitespace-only tokens dropped (and surrounding blanks stripped)."""
    out = []
    for tok in tokenize(text, spec):
        tok = tok.strip()
        if tok:
            out.append(tok)
    return out


@lru_cache(maxsize=4)
def _external(path: str):
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise TokenizerError(f"cannot read vocabulary {path!r}: {exc}") from exc
    if p.suffix == ".json":
        try:
            from tokenizers import Tokenizer
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise TokenizerError("tokenizer.json vocabularies need the 'tokenizers' package") from exc
        tk = Tokenizer.from_str(raw.decode("utf-8"))
        return lambda text: tk.encode(text, add_special_tokens=False).tokens
    vocab = {line for line in raw.decode("utf-8").split("\n") if line}
    if not vocab:
        raise TokenizerError(f"vocabulary {path!r} is empty")
    longest = max(len(v) for v in vocab)

    def greedy(text: str) -> list[str]:
        out, i = [], 0
        while i < len(text):
            for size in range(min(longest, len(text) - i), 0, -1):
                if text[i : i + size] in vocab:
                    break
            else:
                size = 1
            out.append(text[i : i + size])
            i += size
        return out

    return greedy
