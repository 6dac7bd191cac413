"""Token / Line / Block error taxonomy for transcriptions.

Lines are aligned first: a longest common subsequence over exactly equal
lines fixes anchors, and within each gap between anchors the unmatched truth
and hypothesis lines are paired in order, with leftovers paired against an
empty line. Per aligned pair:

* token errors: edit distance between the non-whitespace token sequences;
* Line Error: token errors reach half the truth line's token count. A truth
  line without tokens is a Line Error iff the hypothesis line has tokens;
* Block Error: every maximal run of three or more consecutive Line Errors.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..budget.tokenizer import BUILTIN, TokenizerSpec, content_tokens
from .edit import levenshtein

BLOCK_MIN_RUN = 3


@dataclass(frozen=True)
class ErrorTaxonomy:
    token_errors: int = 0
    line_errors: int = 0
    block_errors: int = 0

    @property
    def has_token_error(self) -> bool:
        return self.token_errors > 0

    @property
    def has_line_error(self) -> bool:
        return self.line_errors > 0

    @property
    def has_block_error(self) -> bool:
        return self.block_errors > 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            has_token_error=self.has_token_error,
            has_line_error=self.has_line_error,
            has_block_error=self.has_block_error,
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorTaxonomy":
        return cls(int(d["token_errors"]), int(d["line_errors"]), int(d["block_errors"]))


def _lcs_pairs(a: list[str], b: list[str]) -> list[tuple[int, int]]:
    n, m = len(a), len(b)
    # suffix LCS lengths; walk forward preferring matches, then truth-side skips
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    pairs = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def align_lines(truth_lines: list[str], hyp_lines: list[str]) -> list[tuple[str | None, str | None]]:
    """Ordered ``(truth_line, hyp_line)`` pairs; ``None`` stands for a missing line."""
    anchors = _lcs_pairs(truth_lines, hyp_lines)
    out: list[tuple[str | None, str | None]] = []
    ti = hi = 0
    for ta, ha in anchors + [(len(truth_lines), len(hyp_lines))]:
        gap_t = truth_lines[ti:ta]
        gap_h = hyp_lines[hi:ha]
        for k in range(max(len(gap_t), len(gap_h))):
            out.append(
                (gap_t[k] if k < len(gap_t) else None, gap_h[k] if k < len(gap_h) else None)
            )
        if ta < len(truth_lines):
            out.append((truth_lines[ta], hyp_lines[ha]))
        ti, hi = ta + 1, ha + 1
    return out


def _lines(text: str) -> list[str]:
    lines = text.replace("\r\n", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def classify_errors(truth: str, hypothesis: str, tokenizer: TokenizerSpec = BUILTIN) -> ErrorTaxonomy:
    if not truth:
        raise ValueError("error classification needs a non-empty reference")
    tokens = lines = blocks = 0
    run = 0
    for t_line, h_line in align_lines(_lines(truth), _lines(hypothesis)):
        t_tok = content_tokens(t_line or "", tokenizer)
        h_tok = content_tokens(h_line or "", tokenizer)
        errors = levenshtein(t_tok, h_tok) if t_line != h_line else 0
        tokens += errors
        if t_tok:
            is_line_error = 2 * errors >= len(t_tok)
        else:
            is_line_error = bool(h_tok)
        if is_line_error:
            lines += 1
            run += 1
        else:
            if run >= BLOCK_MIN_RUN:
                blocks += 1
            run = 0
    if run >= BLOCK_MIN_RUN:
        blocks += 1
    return ErrorTaxonomy(tokens, lines, blocks)
