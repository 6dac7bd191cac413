from __future__ import annotations

import enum
from collections.abc import Hashable, Sequence

from ..budget.tokenizer import BUILTIN, TokenizerSpec, content_tokens


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Unit-cost edit distance between two sequences.

    Bit-parallel dynamic programming (Myers/Hyyro): one column of the DP
    table is packed into Python ints, so each element of ``b`` costs a few
    word operations regardless of ``len(a)``.
    """
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return len(a)
    # b is the pattern (shorter), a is scanned
    peq: dict[Hashable, int] = {}
    for i, sym in enumerate(b):
        peq[sym] = peq.get(sym, 0) | (1 << i)
    full = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = full, 0, m
    for sym in a:
        eq = peq.get(sym, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = (mv | ~(xh | pv)) & full
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & full
        mh = (mh << 1) & full
        pv = (mh | ~(xv | ph)) & full
        mv = ph & xv
    return score


def char_error_rate(truth: str, hypothesis: str) -> float:
    """Character edit distance divided by the reference length (can exceed 1)."""
    if not truth:
        raise ValueError("character error rate needs a non-empty reference")
    return levenshtein(truth, hypothesis) / len(truth)


def edit_similarity(truth: str, hypothesis: str, tokenizer: TokenizerSpec = BUILTIN) -> float:
    """Token-level similarity in percent over non-whitespace tokens."""
    t = content_tokens(truth, tokenizer)
    h = content_tokens(hypothesis, tokenizer)
    longest = max(len(t), len(h))
    if longest == 0:
        return 100.0
    return 100.0 * (1.0 - levenshtein(t, h) / longest)


class Normalization(str, enum.Enum):
    STRICT = "strict"
    TRIM_TRAILING = "trim-trailing"


def normalize(text: str, mode: Normalization) -> str:
    if Normalization(mode) is Normalization.STRICT:
        return text
    lines = [line.rstrip() for line in text.replace("\r\n", "\n").split("\n")]
    return "\n".join(lines).rstrip("\n")


def exact_match(truth: str, hypothesis: str, normalization: Normalization = Normalization.TRIM_TRAILING) -> bool:
    return normalize(truth, normalization) == normalize(hypothesis, normalization)
