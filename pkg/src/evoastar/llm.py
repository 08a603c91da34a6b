"""Chat-completion access: an HTTP client for OpenAI-compatible endpoints,
a deterministic replay client for offline runs, and a recording wrapper that
captures live traffic into replay fixtures.

Replay fixtures are JSON lists of {prompt_sha256, response_text,
input_tokens, output_tokens}. Entries for the same prompt hash are consumed
in file order, so a recorded run replays exactly even when the engine issues
the same prompt text more than once.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable


@dataclass(frozen=True)
class CompletionRequest:
    model: str
    prompt: str
    temperature: float = 1.0
    max_output_tokens: int = 4096
    request_tag: str = ""

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    input_tokens: int
    output_tokens: int
    latency_seconds: float
    estimated: bool = False  # token counts fell back to the length estimate


class LlmError(Exception):
    """Base class for completion failures."""


class AuthError(LlmError):
    """The endpoint rejected our credentials."""


class TransportError(LlmError):
    """Retries exhausted on connection errors or 5xx responses."""


class MalformedPayloadError(LlmError):
    """The provider answered, but not in the expected shape."""


class MissingFixtureError(LlmError):
    """Replay fixture has no (remaining) entry for this prompt."""


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def resolve_fixture_path(spec: str | Path) -> Path:
    """Fixture locator: plain paths pass through; the pkgdata: prefix points
    inside the package's shipped data directory."""
    text = str(spec)
    if text.startswith("pkgdata:"):
        from importlib import resources

        node = resources.files("evoastar").joinpath("data")
        for part in text[len("pkgdata:"):].split("/"):
            node = node.joinpath(part)
        return Path(str(node))
    return Path(text)


def estimate_tokens(text: str) -> int:
    # crude 4-chars-per-token estimate, used only when the provider reports
    # no usage; results are flagged as estimated
    return max(1, (len(text) + 3) // 4)


class HttpChatClient:
    """Minimal client for POST {endpoint}/chat/completions.

    Retries transport errors and 5xx responses with exponential backoff;
    auth and payload problems surface immediately.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = "EVOASTAR_API_KEY",
        max_retries: int = 3,
        backoff_seconds: float = 1.0,
        timeout_seconds: float = 600.0,
        session=None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        import requests

        self.endpoint = endpoint.rstrip("/")
        self.api_key = os.environ.get(api_key_env, "")
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self.timeout_seconds = timeout_seconds
        self._session = session or requests.Session()
        self._sleep = sleep

    def complete(self, request: CompletionRequest) -> CompletionResult:
        import requests

        url = f"{self.endpoint}/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }

        started = time.monotonic()
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_seconds * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    url, json=payload, headers=headers, timeout=self.timeout_seconds
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"endpoint rejected credentials (HTTP {response.status_code})")
            if response.status_code >= 500:
                last_error = TransportError(f"HTTP {response.status_code} from endpoint")
                continue
            if response.status_code != 200:
                raise MalformedPayloadError(
                    f"unexpected HTTP {response.status_code}: {response.text[:200]}"
                )
            return self._parse(response, request, time.monotonic() - started)
        raise TransportError(f"retries exhausted calling {url}: {last_error}")

    def _parse(self, response, request: CompletionRequest, latency: float) -> CompletionResult:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedPayloadError(f"cannot parse provider payload: {exc}") from exc
        usage = body.get("usage") or {}
        input_tokens = usage.get("prompt_tokens")
        output_tokens = usage.get("completion_tokens")
        estimated = input_tokens is None or output_tokens is None
        if estimated:
            input_tokens = estimate_tokens(request.prompt)
            output_tokens = estimate_tokens(text)
        return CompletionResult(
            text=text,
            input_tokens=int(input_tokens),
            output_tokens=int(output_tokens),
            latency_seconds=latency,
            estimated=estimated,
        )


class ReplayClient:
    """Deterministic stand-in: answers from a recorded fixture, keyed by the
    sha256 of the exact rendered prompt. Any prompt drift fails loudly."""

    def __init__(self, fixture_path: str | Path) -> None:
        self.fixture_path = resolve_fixture_path(fixture_path)
        try:
            entries = json.loads(self.fixture_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MissingFixtureError(f"cannot load replay fixture {fixture_path}: {exc}") from exc
        self._queues: dict[str, deque[dict]] = {}
        for entry in entries:
            self._queues.setdefault(entry["prompt_sha256"], deque()).append(entry)

    def fast_forward(self, prompt_hashes) -> None:
        """Discard one recorded entry per given hash, restoring the queue
        position of an interrupted run before resuming it."""
        for digest in prompt_hashes:
            queue = self._queues.get(digest)
            if not queue:
                raise MissingFixtureError(
                    f"cannot fast-forward past prompt hash {digest[:12]}…: "
                    f"not (or no longer) present in the fixture"
                )
            queue.popleft()

    def complete(self, request: CompletionRequest) -> CompletionResult:
        digest = prompt_sha256(request.prompt)
        queue = self._queues.get(digest)
        if not queue:
            raise MissingFixtureError(
                f"no recorded response for prompt hash {digest[:12]}… "
                f"(tag={request.request_tag!r}); the rendered prompt has drifted "
                f"from the recording"
            )
        entry = queue.popleft()
        text = entry["response_text"]
        input_tokens = entry.get("input_tokens")
        output_tokens = entry.get("output_tokens")
        estimated = input_tokens is None or output_tokens is None
        if estimated:
            input_tokens = estimate_tokens(request.prompt)
            output_tokens = estimate_tokens(text)
        return CompletionResult(
            text=text,
            input_tokens=int(input_tokens),
            output_tokens=int(output_tokens),
            latency_seconds=0.0,
            estimated=estimated,
        )


@dataclass
class RecordingClient:
    """Wraps any client and captures (prompt, response) pairs so a live run
    can be turned into a replay fixture."""

    inner: object
    entries: list[dict] = field(default_factory=list)

    def complete(self, request: CompletionRequest) -> CompletionResult:
        result = self.inner.complete(request)
        self.entries.append(
            {
                "prompt_sha256": prompt_sha256(request.prompt),
                "response_text": result.text,
                "input_tokens": result.input_tokens,
                "output_tokens": result.output_tokens,
            }
        )
        return result

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.entries, indent=2) + "\n", encoding="utf-8")
        return path


def usage_report(log_path: str | Path) -> dict[tuple[str, str], dict]:
    """Mean input/output tokens per (problem, mode) from a run log.

    Reads the JSONL event stream; llm_response events carry token counts and
    the run's problem/mode stamp. Empty or absent logs yield an empty report.
    """
    path = Path(log_path)
    if not path.exists():
        return {}
    totals: dict[tuple[str, str], dict] = {}
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
            if event.get("event") != "llm_response":
                continue
            key = (event.get("problem", "?"), event.get("mode", "?"))
            bucket = totals.setdefault(
                key, {"count": 0, "input_tokens": 0, "output_tokens": 0}
            )
            bucket["count"] += 1
            bucket["input_tokens"] += int(event.get("input_tokens", 0))
            bucket["output_tokens"] += int(event.get("output_tokens", 0))
    report = {}
    for key, bucket in totals.items():
        count = bucket["count"]
        report[key] = {
            "count": count,
            "mean_input_tokens": bucket["input_tokens"] / count,
            "mean_output_tokens": bucket["output_tokens"] / count,
        }
    return report
