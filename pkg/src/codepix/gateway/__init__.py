"""OpenAI-compatible endpoint access: transcription, judging, cost."""

from .client import (
    DEFAULT_REPEATS,
    Gateway,
    RunLogEntry,
    build_request,
    load_prompt,
    request_digest,
    run_repeats,
    strip_code_fence,
    transcribe_images,
)
from .judge import JudgeFormatError, comp_score, parse_score
from .pricing import CostEstimate, ModelRates, PricingTable, UnknownModelError, estimate_cost
from .transport import (
    RETRYABLE_STATUS,
    ConfigurationError,
    EndpointConfig,
    GatewayError,
    HttpxTransport,
    RequestTooLargeError,
    Transport,
    TransportError,
    backoff_delays,
    post_with_retries,
)

__all__ = [
    "DEFAULT_REPEATS",
    "RETRYABLE_STATUS",
    "ConfigurationError",
    "CostEstimate",
    "EndpointConfig",
    "Gateway",
    "GatewayError",
    "HttpxTransport",
    "JudgeFormatError",
    "ModelRates",
    "PricingTable",
    "RequestTooLargeError",
    "RunLogEntry",
    "Transport",
    "TransportError",
    "UnknownModelError",
    "backoff_delays",
    "build_request",
    "comp_score",
    "estimate_cost",
    "load_prompt",
    "parse_score",
    "post_with_retries",
    "request_digest",
    "run_repeats",
    "strip_code_fence",
    "transcribe_images",
]
