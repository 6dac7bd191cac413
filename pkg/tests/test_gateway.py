from __future__ import annotations

import base64
from decimal import Decimal

import httpx
import pytest

from codepix.gateway import (
    ConfigurationError,
    Gateway,
    JudgeFormatError,
    PricingTable,
    RequestTooLargeError,
    TransportError,
    UnknownModelError,
    backoff_delays,
    build_request,
    comp_score,
    estimate_cost,
    parse_score,
    request_digest,
    run_repeats,
    strip_code_fence,
    transcribe_images,
)
from codepix.gateway.transport import EndpointConfig, HttpxTransport
from conftest import MockTransport


# --- request building -----------------------------------------------------

def test_request_order_and_bytes():
    imgs = [b"\x89PNG-one", b"\x89PNG-two", b"\x89PNG-three"]
    doc = build_request("transcribe", imgs, {"temperature": 0}, model="m")
    parts = doc["messages"][0]["content"]
    assert parts[0] == {"type": "text", "text": "transcribe"}
    decoded = [base64.b64decode(p["image_url"]["url"].split(",", 1)[1]) for p in parts[1:]]
    assert decoded == imgs
    assert all(p["image_url"]["url"].startswith("data:image/png;base64,") for p in parts[1:])
    assert doc["model"] == "m" and doc["temperature"] == 0


def test_request_text_only_and_empty():
    doc = build_request("hi", [])
    assert doc["messages"][0]["content"] == [{"type": "text", "text": "hi"}]
    with pytest.raises(ValueError):
        build_request("", [])


def test_request_too_large():
    with pytest.raises(RequestTooLargeError):
        build_request("x", [b"0" * 11], max_image_bytes=10)


def test_digest_stable():
    a = build_request("x", [b"1"], {"seed": 1}, model="m")
    b = build_request("x", [b"1"], {"seed": 1}, model="m")
    assert request_digest(a) == request_digest(b)
    assert request_digest(a) != request_digest(build_request("y", [b"1"], model="m"))


# --- transport ------------------------------------------------------------

def test_round_trip_and_fence(endpoint, no_sleep):
    sleep, slept = no_sleep
    mock = MockTransport([(200, "```python\nprint(1)\n```")])
    out = transcribe_images([b"png"], Gateway(endpoint, mock, sleep))
    assert out == "print(1)"
    call = mock.calls[0]
    assert call["url"] == "http://mock.invalid/v1/chat/completions"
    assert call["headers"]["Authorization"] == "Bearer sk-test"
    assert call["timeout"] == 5.0 and slept == []


def test_fence_rules():
    assert strip_code_fence("```\na\nb\n```") == "a\nb"
    assert strip_code_fence("no fence") == "no fence"
    assert strip_code_fence("text ```x``` text") == "text ```x``` text"


def test_retry_then_success(endpoint, no_sleep):
    sleep, slept = no_sleep
    mock = MockTransport([(429, None), (503, None), (200, "ok")])
    gw = Gateway(endpoint, mock, sleep)
    assert gw.complete("x") == "ok"
    assert len(mock.calls) == 3
    assert slept == [0.5, 1.0]
    assert gw.log[0].attempts == 3


def test_retry_on_connection_error(endpoint, no_sleep):
    sleep, slept = no_sleep
    mock = MockTransport([(httpx.ConnectError("down"), None), (200, "ok")])
    assert Gateway(endpoint, mock, sleep).complete("x") == "ok"
    assert slept == [0.5]


def test_retries_exhausted(endpoint, no_sleep):
    sleep, slept = no_sleep
    mock = MockTransport([(500, None)] * 10)
    with pytest.raises(TransportError) as err:
        Gateway(endpoint, mock, sleep).complete("x")
    assert err.value.attempts == endpoint.max_retries + 1 == len(mock.calls)
    assert slept == sorted(slept) == backoff_delays(3, 0.5)


def test_non_retryable_fails_fast(endpoint, no_sleep):
    sleep, slept = no_sleep
    mock = MockTransport([(401, None), (200, "never")])
    with pytest.raises(TransportError) as err:
        Gateway(endpoint, mock, sleep).complete("x")
    assert err.value.status == 401 and len(mock.calls) == 1 and slept == []


def test_missing_key(monkeypatch, no_sleep):
    monkeypatch.delenv("CODEPIX_ABSENT_KEY", raising=False)
    ep = EndpointConfig("http://mock.invalid/v1", "m", api_key_env="CODEPIX_ABSENT_KEY")
    mock = MockTransport()
    with pytest.raises(ConfigurationError) as err:
        Gateway(ep, mock, no_sleep[0]).complete("x")
    assert "CODEPIX_ABSENT_KEY" in str(err.value)
    assert mock.calls == []


def test_backoff_non_decreasing():
    d = backoff_delays(5, 1.0)
    assert d == [1.0, 2.0, 4.0, 8.0, 16.0]
    assert backoff_delays(0, 1.0) == []


def test_httpx_transport_uses_client():
    seen = {}

    def handler(request: httpx.Request):
        seen["url"] = str(request.url)
        seen["body"] = request.content
        return httpx.Response(200, content=b'{"ok": 1}')

    client = httpx.Client(transport=httpx.MockTransport(handler))
    status, body = HttpxTransport(client)("http://h/v1/chat/completions", {}, b"{}", 1.0)
    assert status == 200 and body == b'{"ok": 1}' and seen["body"] == b"{}"


def test_run_repeats_keyed_and_logged(endpoint, no_sleep):
    def echo(doc):
        return doc["messages"][0]["content"][1]["image_url"]["url"][-8:]

    mock = MockTransport(default=echo)
    gw = Gateway(endpoint, mock, no_sleep[0])
    samples = [(f"s{i}", [f"img{i}".encode()]) for i in range(4)]
    out = run_repeats(samples, gw, repeats=3, parallelism=4)
    assert sorted(out) == [(f"s{i}", r) for i in range(4) for r in range(3)]
    assert len(mock.calls) == 12
    log = gw.sorted_log()
    assert [(e.sample_id, e.run_index) for e in log] == sorted(out)
    assert all(e.response_text for e in log)


# --- judge ----------------------------------------------------------------

def test_parse_score():
    assert parse_score("85") == 85.0
    assert parse_score("Score: 85/100") == 85.0
    assert parse_score("I'd say 72.5.") == 72.5
    for bad in ("excellent", "", "150", "-5 only"):
        with pytest.raises(JudgeFormatError):
            parse_score(bad)


@pytest.mark.parametrize("replies,expected", [(("60", "40"), 50.0), (("70", "70"), 70.0)])
def test_comp_score(endpoint, no_sleep, replies, expected):
    mock = MockTransport([(200, r) for r in replies])
    gw = Gateway(endpoint, mock, no_sleep[0])
    assert comp_score("print(1)", "print(2)", gw) == expected
    texts = [c["doc"]["messages"][0]["content"][0]["text"] for c in mock.calls]
    # presentation order is swapped between the two calls
    assert texts[0].index("print(1)") < texts[0].index("print(2)")
    assert texts[1].index("print(2)") < texts[1].index("print(1)")


def test_comp_score_bad_reply(endpoint, no_sleep):
    mock = MockTransport([(200, "excellent"), (200, "excellent")])
    with pytest.raises(JudgeFormatError):
        comp_score("a", "b", Gateway(endpoint, mock, no_sleep[0]))


# --- pricing --------------------------------------------------------------

def test_cost_fixtures():
    assert estimate_cost(1_000_000, 0, "GPT-5-mini").total_cost == Decimal("0.25")
    assert estimate_cost(25_600, 0, "Gemini-3-Pro").total_cost == Decimal("0.0512")
    low = estimate_cost(200_000, 0, "Gemini-2.5-Pro")
    high = estimate_cost(200_001, 0, "Gemini-2.5-Pro")
    assert low.tier == "low" and high.tier == "high"
    assert low.total_cost == Decimal("0.25")
    assert high.total_cost == Decimal("200001") * Decimal("2.50") / Decimal(10**6)


def test_cost_additive_and_errors():
    a = estimate_cost(1000, 0, "GPT-5.1").total_cost
    b = estimate_cost(0, 500, "GPT-5.1").total_cost
    assert estimate_cost(1000, 500, "GPT-5.1").total_cost == a + b
    assert estimate_cost(0, 0, "GPT-5.1").total_cost == 0
    with pytest.raises(UnknownModelError):
        estimate_cost(1, 1, "no-such-model")
    with pytest.raises(ValueError):
        estimate_cost(-1, 0, "GPT-5.1")
    assert set(PricingTable.load().models) >= {"GPT-5-mini", "Gemini-3-Pro", "Qwen-3-VL"}
