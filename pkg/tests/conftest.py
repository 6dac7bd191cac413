from __future__ import annotations

import json
import threading

import pytest

from codepix.gateway.transport import EndpointConfig


class MockTransport:
    """Records requests and answers from a script of (status, text) pairs.

    After the script runs out, ``default`` builds the reply from the request.
    """

    def __init__(self, script=None, default=None):
        self.script = list(script or [])
        self.default = default or (lambda doc: "print('hi')")
        self.calls: list[dict] = []
        self._lock = threading.Lock()

    def __call__(self, url, headers, body, timeout):
        doc = json.loads(body)
        with self._lock:
            self.calls.append({"url": url, "headers": headers, "doc": doc, "timeout": timeout})
            step = self.script.pop(0) if self.script else None
        if step is None:
            return 200, reply(self.default(doc))
        status, text = step
        if isinstance(status, Exception):
            raise status
        return status, reply(text) if text is not None else b"{}"


def reply(text: str) -> bytes:
    return json.dumps({"choices": [{"message": {"role": "assistant", "content": text}}]}).encode()


@pytest.fixture
def endpoint(monkeypatch):
    monkeypatch.setenv("CODEPIX_TEST_KEY", "sk-test")
    return EndpointConfig(
        base_url="http://mock.invalid/v1",
        model_id="mock-model",
        api_key_env="CODEPIX_TEST_KEY",
        timeout=5.0,
        max_retries=3,
        backoff_base=0.5,
    )


@pytest.fixture
def no_sleep():
    slept: list[float] = []
    return slept.append, slept


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, after the normal report."""
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1][len("test_criterion_"):]
            num, _, title = name.partition("_")
            detail = dict(getattr(rep, "user_properties", ())).get("detail", "")
            prev = rows.get(int(num))
            if prev is None or outcome != "passed":
                rows[int(num)] = ("PASS" if outcome == "passed" else "FAIL", title.replace("_", " "), detail)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(rows):
        status, title, detail = rows[num]
        line = f"criterion {num:2d} [{status}] {title}"
        terminalreporter.write_line(line + (f": {detail}" if detail else ""))
