"""Token accounting: text tokens, patch-grid planning and downsampling."""

from .plan import (
    CompressionPlan,
    InfeasiblePlanError,
    PatchSpec,
    PlanError,
    choose_grid,
    plan_compression,
    visual_token_count,
)
from .resample import ResampleError, downsample_bilinear
from .tokenizer import (
    BUILTIN,
    BUILTIN_RULE_VERSION,
    TokenizerError,
    TokenizerKind,
    TokenizerSpec,
    content_tokens,
    count_text_tokens,
    tokenize,
)

__all__ = [
    "BUILTIN",
    "BUILTIN_RULE_VERSION",
    "CompressionPlan",
    "InfeasiblePlanError",
    "PatchSpec",
    "PlanError",
    "ResampleError",
    "TokenizerError",
    "TokenizerKind",
    "TokenizerSpec",
    "choose_grid",
    "content_tokens",
    "count_text_tokens",
    "downsample_bilinear",
    "plan_compression",
    "tokenize",
    "visual_token_count",
]
