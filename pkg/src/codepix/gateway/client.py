from __future__ import annotations

import base64
import hashlib
import json
import re
import threading
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .transport import (
    EndpointConfig,
    GatewayError,
    RequestTooLargeError,
    Transport,
    post_with_retries,
)

PROMPT_DIR = Path(__file__).resolve().parent.parent / "assets" / "prompts"
DEFAULT_REPEATS = 5

_FENCE = re.compile(r"\A\s*```[^\n]*\n(.*?)\n?```\s*\Z", re.DOTALL)


def load_prompt(name: str = "ocr") -> str:
    return (PROMPT_DIR / f"{name}.txt").read_text("utf-8").strip()


def prompt_version(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def build_request(
    instruction: str,
    images: Sequence[bytes] = (),
    options: dict | None = None,
    *,
    model: str | None = None,
    max_image_bytes: int = 20 * 1024 * 1024,
) -> dict:
    """Chat-completions document with one user message: text first, then images in order."""
    if not instruction and not images:
        raise ValueError("request needs an instruction or at least one image")
    for i, img in enumerate(images):
        if len(img) > max_image_bytes:
            raise RequestTooLargeError(
                f"image {i} is {len(img)} bytes, over the {max_image_bytes}-byte limit"
            )
    content: list[dict] = []
    if instruction:
        content.append({"type": "text", "text": instruction})
    for img in images:
        url = "data:image/png;base64," + base64.b64encode(img).decode("ascii")
        content.append({"type": "image_url", "image_url": {"url": url}})
    doc: dict = {}
    if model is not None:
        doc["model"] = model
    doc["messages"] = [{"role": "user", "content": content}]
    for k, v in (options or {}).items():
        doc.setdefault(k, v)
    return doc


def request_digest(document: dict) -> str:
    raw = json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()


def strip_code_fence(text: str) -> str:
    """Remove one code fence wrapping the whole response, if present."""
    m = _FENCE.match(text)
    return m.group(1) if m else text


def response_text(payload: dict) -> str:
    try:
        content = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise GatewayError(f"unexpected response shape: {str(payload)[:200]}") from exc
    if isinstance(content, list):
        content = "".join(p.get("text", "") for p in content if isinstance(p, dict))
    return content or ""


@dataclass
class RunLogEntry:
    sample_id: str
    run_index: int
    request_digest: str
    response_text: str
    latency_ms: float
    attempts: int
    prompt_version: str = ""

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "run_index": self.run_index,
            "request_digest": self.request_digest,
            "response_text": self.response_text,
            "latency_ms": self.latency_ms,
            "attempts": self.attempts,
            "prompt_version": self.prompt_version,
        }


class Gateway:
    """Sends transcription and judge requests to one OpenAI-compatible endpoint."""

    def __init__(
        self,
        endpoint: EndpointConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        options: dict | None = None,
    ):
        self.endpoint = endpoint
        if transport is None:
            from .transport import HttpxTransport

            transport = HttpxTransport()
        self.transport = transport
        self.sleep = sleep
        self.options = dict(options or {})
        self._lock = threading.Lock()
        self.log: list[RunLogEntry] = []

    def complete(self, instruction: str, images: Sequence[bytes] = (), *, sample_id="", run_index=0) -> str:
        doc = build_request(
            instruction,
            images,
            self.options,
            model=self.endpoint.model_id,
            max_image_bytes=self.endpoint.max_image_bytes,
        )
        start = time.perf_counter()
        payload, attempts = post_with_retries(self.endpoint, doc, self.transport, self.sleep)
        latency = (time.perf_counter() - start) * 1000.0
        text = response_text(payload)
        entry = RunLogEntry(
            sample_id, run_index, request_digest(doc), text, round(latency, 3), len(attempts),
            prompt_version(instruction),
        )
        with self._lock:
            self.log.append(entry)
        return text

    def sorted_log(self) -> list[RunLogEntry]:
        with self._lock:
            return sorted(self.log, key=lambda e: (e.sample_id, e.run_index))


def transcribe_images(
    images: Sequence[bytes],
    endpoint: EndpointConfig | Gateway,
    transport: Transport | None = None,
    prompt: str | None = None,
    *,
    sample_id: str = "",
    run_index: int = 0,
) -> str:
    """Ask the model to transcribe page images; returns the text with a wrapping fence removed."""
    gw = endpoint if isinstance(endpoint, Gateway) else Gateway(endpoint, transport)
    text = gw.complete(prompt or load_prompt("ocr"), images, sample_id=sample_id, run_index=run_index)
    return strip_code_fence(text)


def run_repeats(
    samples: Sequence[tuple[str, Sequence[bytes]]],
    gateway: Gateway,
    repeats: int = DEFAULT_REPEATS,
    parallelism: int = 4,
    prompt: str | None = None,
) -> dict[tuple[str, int], str]:
    """Transcribe every ``(sample_id, images)`` ``repeats`` times.

    Results are keyed by ``(sample_id, run_index)`` so completion order never
    shows through.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    prompt = prompt or load_prompt("ocr")
    jobs = [(sid, imgs, r) for sid, imgs in samples for r in range(repeats)]

    def one(job):
        sid, imgs, r = job
        return (sid, r), transcribe_images(imgs, gateway, prompt=prompt, sample_id=sid, run_index=r)

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    return dict(sorted(results))
