"""N-gram and keyword-weighted n-gram match (the lexical half of CodeBLEU).

Both halves use clipped n-gram precision, a uniform geometric mean over
orders ``1..max_n`` and the usual brevity penalty. The weighted half scores
unigrams by token weight (keywords count more); higher orders are unweighted.
Orders for which the hypothesis has no n-grams at all are left out of the
mean. There is no smoothing, so any zero precision gives a zero score.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping

from ..budget.tokenizer import BUILTIN, TokenizerSpec, content_tokens
from ..style.lexer import default_registry

OTHER_TOKEN_WEIGHT = 0.2


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _brevity(ref_len: int, hyp_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    if hyp_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def _score(ref: list[str], hyp: list[str], max_n: int, weight=None) -> float:
    logs = []
    for n in range(1, max_n + 1):
        h = _ngrams(hyp, n)
        if not h:
            break
        r = _ngrams(ref, n)
        if n == 1 and weight is not None:
            num = sum(weight(g[0]) * min(c, r[g]) for g, c in h.items())
            den = sum(weight(g[0]) * c for g, c in h.items())
        else:
            num = sum(min(c, r[g]) for g, c in h.items())
            den = sum(h.values())
        if num == 0 or den == 0:
            return 0.0
        logs.append(math.log(num / den))
    if not logs:
        return 0.0
    return _brevity(len(ref), len(hyp)) * math.exp(sum(logs) / len(logs))


def ngram_match(
    truth: str,
    hypothesis: str,
    max_n: int = 4,
    keyword_weights: Mapping[str, float] | None = None,
    other_weight: float = OTHER_TOKEN_WEIGHT,
    tokenizer: TokenizerSpec = BUILTIN,
) -> float:
    """Mean of plain and keyword-weighted n-gram match, in ``[0, 1]``.

    With ``keyword_weights=None`` every token weighs 1 and both halves agree.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    ref = content_tokens(truth, tokenizer)
    hyp = content_tokens(hypothesis, tokenizer)
    if not ref and not hyp:
        return 1.0
    plain = _score(ref, hyp, max_n)
    if keyword_weights is None:
        return plain
    weights = dict(keyword_weights)
    weighted = _score(ref, hyp, max_n, lambda tok: weights.get(tok, other_weight))
    return (plain + weighted) / 2.0


def keyword_weights(language: str) -> dict[str, float]:
    """Weight 1.0 for each keyword of ``language`` (empty for unknown languages)."""
    reg = default_registry()
    if language not in reg or language == "plain-text":
        return {}
    return {kw: 1.0 for kw in reg.get(language).keywords}
