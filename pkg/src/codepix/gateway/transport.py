from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from typing import Callable, Protocol

RETRYABLE_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


class GatewayError(RuntimeError):
    pass


class ConfigurationError(GatewayError):
    pass


class TransportError(GatewayError):
    def __init__(self, message: str, status: int | None = None, attempts: int = 0):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class RequestTooLargeError(GatewayError):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model_id: str
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 120.0
    max_retries: int = 3
    backoff_base: float = 1.0
    max_image_bytes: int = 20 * 1024 * 1024

    def __post_init__(self):
        if self.max_retries < 0:
            raise ConfigurationError("max_retries must be >= 0")
        if not self.timeout > 0:
            raise ConfigurationError("timeout must be positive")
        if self.backoff_base < 0:
            raise ConfigurationError("backoff_base must be >= 0")

    @property
    def chat_url(self) -> str:
        return self.base_url.rstrip("/") + "/chat/completions"

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise ConfigurationError(f"environment variable {self.api_key_env} is not set")
        return key

    def to_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "model_id": self.model_id,
            "api_key_env": self.api_key_env,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "backoff_base": self.backoff_base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EndpointConfig":
        return cls(**d)


class Transport(Protocol):
    """Sends one HTTP POST; returns ``(status_code, response_body)``."""

    def __call__(self, url: str, headers: dict[str, str], body: bytes, timeout: float) -> tuple[int, bytes]: ...


class HttpxTransport:
    def __init__(self, client=None):
        if client is None:
            import httpx

            client = httpx.Client()
        self._client = client

    def __call__(self, url, headers, body, timeout):
        resp = self._client.post(url, headers=headers, content=body, timeout=timeout)
        return resp.status_code, resp.content


@dataclass
class Attempt:
    status: int | None
    error: str | None
    delay_before: float


def backoff_delays(max_retries: int, base: float) -> list[float]:
    """Exponential, non-decreasing wait before each retry."""
    return [base * (2**i) for i in range(max_retries)]


def post_with_retries(
    endpoint: EndpointConfig,
    document: dict,
    transport: Transport,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[dict, list[Attempt]]:
    """POST ``document`` to the chat endpoint, retrying transient failures.

    Retries on connection errors and on statuses in ``RETRYABLE_STATUS``; at
    most ``endpoint.max_retries`` retries follow the first attempt.
    """
    headers = {
        "Authorization": f"Bearer {endpoint.api_key()}",
        "Content-Type": "application/json",
    }
    body = json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
    delays = backoff_delays(endpoint.max_retries, endpoint.backoff_base)
    attempts: list[Attempt] = []
    last_status = None
    for i in range(endpoint.max_retries + 1):
        delay = delays[i - 1] if i else 0.0
        if delay:
            sleep(delay)
        try:
            status, payload = transport(endpoint.chat_url, headers, body, endpoint.timeout)
        except Exception as exc:  # network-level failures are retryable
            attempts.append(Attempt(None, f"{type(exc).__name__}: {exc}", delay))
            continue
        attempts.append(Attempt(status, None, delay))
        last_status = status
        if 200 <= status < 300:
            try:
                return json.loads(payload), attempts
            except ValueError as exc:
                raise TransportError(f"endpoint returned invalid JSON: {exc}", status, len(attempts)) from exc
        if status not in RETRYABLE_STATUS:
            break
    raise TransportError(
        f"request failed after {len(attempts)} attempt(s), last status {last_status}",
        last_status,
        len(attempts),
    )
