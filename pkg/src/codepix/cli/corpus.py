from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..budget.tokenizer import BUILTIN, TokenizerSpec, count_text_tokens
from ..render.layout import normalize_source, split_lines
from ..style.lexer import Registry, default_registry

DEFAULT_MIN_LINES = 50
DEFAULT_MAX_LINES = 120


class EmptyCorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    path: str
    language: str
    line_count: int
    text_tokens: int
    sha256: str

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "language": self.language,
            "line_count": self.line_count,
            "text_tokens": self.text_tokens,
            "sha256": self.sha256,
        }


@dataclass
class CorpusManifest:
    root: str
    entries: list[CorpusEntry]
    filters_applied: dict
    skipped: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "filters_applied": self.filters_applied,
            "entries": [e.to_dict() for e in self.entries],
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def iter_source_files(root: str | Path, registry: Registry | None = None) -> list[Path]:
    """Source files under ``root`` by known extension, sorted, one per real file.

    Symlinked files and directories are followed once; a file reachable by
    several paths is kept under its lexicographically first path.
    """
    registry = registry or default_registry()
    exts = set(registry.extensions())
    root = Path(root)
    if root.is_file():
        return [root]
    seen_dirs: set[str] = set()
    seen_files: set[str] = set()
    found: list[Path] = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=True):
        real = os.path.realpath(dirpath)
        if real in seen_dirs:
            dirnames[:] = []
            continue
        seen_dirs.add(real)
        dirnames.sort()
        for name in sorted(filenames):
            p = Path(dirpath) / name
            if p.suffix.lower() in exts and p.is_file():
                found.append(p)
    out = []
    for p in sorted(found, key=lambda q: q.as_posix()):
        real = os.path.realpath(p)
        if real not in seen_files:
            seen_files.add(real)
            out.append(p)
    return out


def ingest_corpus(
    root: str | Path,
    min_lines: int = DEFAULT_MIN_LINES,
    max_lines: int = DEFAULT_MAX_LINES,
    tokenizer: TokenizerSpec = BUILTIN,
    registry: Registry | None = None,
) -> CorpusManifest:
    """Collect source files whose line count lies in ``[min_lines, max_lines]``."""
    registry = registry or default_registry()
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError(root)
    entries: list[CorpusEntry] = []
    skipped: list[dict] = []
    for path in iter_source_files(root, registry):
        rel = path.relative_to(root).as_posix() if path != root else path.name
        raw = path.read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            skipped.append({"path": rel, "reason": "not valid UTF-8"})
            continue
        n = len(split_lines(normalize_source(text)))
        if not min_lines <= n <= max_lines:
            continue
        entries.append(
            CorpusEntry(
                path=rel,
                language=registry.language_for_path(path),
                line_count=n,
                text_tokens=count_text_tokens(text, tokenizer),
                sha256=hashlib.sha256(raw).hexdigest(),
            )
        )
    if not entries:
        raise EmptyCorpusError(
            f"no source files under {root} with {min_lines}-{max_lines} lines"
        )
    return CorpusManifest(
        root=str(root),
        entries=entries,
        filters_applied={"min_lines": min_lines, "max_lines": max_lines},
        skipped=skipped,
    )
