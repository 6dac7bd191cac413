from __future__ import annotations

import math
import statistics
from collections.abc import Iterable, Sequence

from .taxonomy import ErrorTaxonomy

EXACT_MAX_N = 25


class DegenerateInputError(ValueError):
    pass


def summarize_runs(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    values = list(values)
    if not values:
        raise ValueError("no values to summarize")
    mean = statistics.mean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return float(mean), float(std)


def prevalence(records: Iterable[ErrorTaxonomy]) -> dict[str, float]:
    """Percent of records with at least one token, line and block error."""
    records = list(records)
    if not records:
        raise ValueError("prevalence of an empty record set is undefined")
    n = len(records)
    return {
        "token": 100.0 * sum(r.has_token_error for r in records) / n,
        "line": 100.0 * sum(r.has_line_error for r in records) / n,
        "block": 100.0 * sum(r.has_block_error for r in records) / n,
    }


def _midranks_doubled(values: list[float]) -> list[int]:
    """Twice the average rank of each value, so tied ranks stay integral."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # positions i..j hold ranks i+1..j+1; doubled average = i + j + 2
        for k in range(i, j + 1):
            ranks[order[k]] = i + j + 2
        i = j + 1
    return ranks


def _exact_lower_tail(doubled_ranks: list[int], stat2: int) -> float:
    """P(W+ <= stat) under the null, with W+ and stat in doubled-rank units."""
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    reach = 0
    for r in doubled_ranks:
        for s in range(reach, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
        reach += r
    return sum(counts[: stat2 + 1]) / 2 ** len(doubled_ranks)


def wilcoxon_signed_rank(
    paired_a: Sequence[float], paired_b: Sequence[float], min_n: int = 5
) -> tuple[float, float]:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped. The statistic is ``min(W+, W-)`` with
    average ranks for ties. Up to 25 pairs the p-value comes from the exact
    permutation distribution of the (tied) ranks; beyond that from the normal
    approximation with tie-corrected variance and no continuity correction.
    """
    if len(paired_a) != len(paired_b):
        raise ValueError("paired samples must have equal length")
    diffs = [float(b) - float(a) for a, b in zip(paired_a, paired_b)]
    diffs = [d for d in diffs if d != 0.0]
    if not diffs:
        raise DegenerateInputError("all paired differences are zero")
    n = len(diffs)
    if n < min_n:
        raise ValueError(f"need at least {min_n} non-zero differences, got {n}")
    ranks2 = _midranks_doubled([abs(d) for d in diffs])
    w_plus2 = sum(r for r, d in zip(ranks2, diffs) if d > 0)
    total2 = sum(ranks2)
    stat2 = min(w_plus2, total2 - w_plus2)
    statistic = stat2 / 2
    if n <= EXACT_MAX_N:
        p = min(1.0, 2.0 * _exact_lower_tail(ranks2, stat2))
        return statistic, p
    mean = n * (n + 1) / 4
    ties: dict[int, int] = {}
    for r in ranks2:
        ties[r] = ties.get(r, 0) + 1
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(t**3 - t for t in ties.values()) / 48
    if var <= 0:
        raise DegenerateInputError("zero variance in signed ranks")
    z = (statistic - mean) / math.sqrt(var)
    return statistic, min(1.0, math.erfc(abs(z) / math.sqrt(2)))
