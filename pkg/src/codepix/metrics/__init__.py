"""Reconstruction metrics, error taxonomy and significance testing."""

from .edit import Normalization, char_error_rate, edit_similarity, exact_match, levenshtein
from .ngram import keyword_weights, ngram_match
from .report import (
    MetricReport,
    ReconstructionRecord,
    read_jsonl,
    score_record,
    summarize_reports,
    write_jsonl,
)
from .stats import DegenerateInputError, prevalence, summarize_runs, wilcoxon_signed_rank
from .taxonomy import ErrorTaxonomy, align_lines, classify_errors

__all__ = [
    "DegenerateInputError",
    "ErrorTaxonomy",
    "MetricReport",
    "Normalization",
    "ReconstructionRecord",
    "align_lines",
    "char_error_rate",
    "classify_errors",
    "edit_similarity",
    "exact_match",
    "keyword_weights",
    "levenshtein",
    "ngram_match",
    "prevalence",
    "read_jsonl",
    "score_record",
    "summarize_reports",
    "summarize_runs",
    "wilcoxon_signed_rank",
    "write_jsonl",
]
