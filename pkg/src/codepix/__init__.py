"""Render source code into token-budgeted images and measure what compression loses."""

from .budget import (
    CompressionPlan,
    PatchSpec,
    TokenizerSpec,
    count_text_tokens,
    downsample_bilinear,
    plan_compression,
    visual_token_count,
)
from .metrics import (
    ErrorTaxonomy,
    MetricReport,
    ReconstructionRecord,
    char_error_rate,
    classify_errors,
    edit_similarity,
    exact_match,
    levenshtein,
    ngram_match,
    wilcoxon_signed_rank,
)
from .render import PageImage, RenderConfig, Style, encode_png, layout_document, render_document

__version__ = "0.1.0"

__all__ = [
    "CompressionPlan",
    "ErrorTaxonomy",
    "MetricReport",
    "PageImage",
    "PatchSpec",
    "ReconstructionRecord",
    "RenderConfig",
    "Style",
    "TokenizerSpec",
    "char_error_rate",
    "classify_errors",
    "count_text_tokens",
    "downsample_bilinear",
    "edit_similarity",
    "encode_png",
    "exact_match",
    "layout_document",
    "levenshtein",
    "ngram_match",
    "plan_compression",
    "render_document",
    "visual_token_count",
    "wilcoxon_signed_rank",
]
