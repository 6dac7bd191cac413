from __future__ import annotations

import re

from .client import Gateway, load_prompt
from .transport import GatewayError

# a standalone number: not part of a word, a longer number or a negative value
_SCORE = re.compile(r"(?<![\w.\-])(\d{1,3}(?:\.\d+)?)(?!\w|\.\d)")


class JudgeFormatError(GatewayError):
    def __init__(self, raw: str):
        super().__init__(f"judge reply has no score in [0, 100]: {raw[:200]!r}")
        self.raw = raw


def parse_score(raw: str) -> float:
    """The first number in ``raw`` that lies in ``[0, 100]``."""
    for m in _SCORE.findall(raw):
        value = float(m)
        if 0.0 <= value <= 100.0:
            return value
    raise JudgeFormatError(raw)


def comp_score(generated: str, reference: str, judge: Gateway, *, sample_id: str = "") -> float:
    """LLM-as-judge score of ``generated`` against ``reference``, in ``[0, 100]``.

    The judge sees the pair twice with the presentation order swapped and
    always scores the candidate; the two scores are averaged. 50 means parity.
    """
    template = load_prompt("judge")
    first = template.format(
        first_label="CANDIDATE", first=generated, second_label="REFERENCE", second=reference
    )
    second = template.format(
        first_label="REFERENCE", first=reference, second_label="CANDIDATE", second=generated
    )
    s1 = parse_score(judge.complete(first, sample_id=sample_id, run_index=0))
    s2 = parse_score(judge.complete(second, sample_id=sample_id, run_index=1))
    return (s1 + s2) / 2.0
