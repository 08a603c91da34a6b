import json

import pytest

from evoastar.llm import (
    AuthError,
    CompletionRequest,
    HttpChatClient,
    MalformedPayloadError,
    MissingFixtureError,
    RecordingClient,
    ReplayClient,
    TransportError,
    estimate_tokens,
    prompt_sha256,
    usage_report,
)


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError("no json")
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers})
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def ok_payload(text="hello", prompt_tokens=12, completion_tokens=7):
    return {
        "choices": [{"message": {"content": text}}],
        "usage": {"prompt_tokens": prompt_tokens, "completion_tokens": completion_tokens},
    }


def request(prompt="say hello"):
    return CompletionRequest(model="test-model", prompt=prompt, request_tag="t")


class TestHttpClient:
    def test_success_reports_usage(self):
        session = FakeSession([FakeResponse(200, ok_payload())])
        client = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        result = client.complete(request())
        assert result.text == "hello"
        assert (result.input_tokens, result.output_tokens) == (12, 7)
        assert not result.estimated

    def test_retries_then_succeeds(self):
        import requests

        session = FakeSession(
            [
                requests.ConnectionError("down"),
                FakeResponse(503, text="overloaded"),
                FakeResponse(200, ok_payload()),
            ]
        )
        slept = []
        client = HttpChatClient(
            "http://example/v1", max_retries=3, session=session, sleep=slept.append
        )
        result = client.complete(request())
        assert result.text == "hello"
        assert len(slept) == 2  # exponential backoff between attempts

    def test_retries_exhausted(self):
        session = FakeSession([FakeResponse(500)] * 4)
        client = HttpChatClient(
            "http://example/v1", max_retries=3, session=session, sleep=lambda s: None
        )
        with pytest.raises(TransportError):
            client.complete(request())

    def test_auth_failure_surfaces_immediately(self):
        session = FakeSession([FakeResponse(401)])
        client = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        with pytest.raises(AuthError):
            client.complete(request())
        assert len(session.calls) == 1

    def test_malformed_payload(self):
        session = FakeSession([FakeResponse(200, {"nope": True})])
        client = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        with pytest.raises(MalformedPayloadError):
            client.complete(request())

    def test_missing_usage_falls_back_to_estimate(self):
        payload = {"choices": [{"message": {"content": "hi"}}]}
        session = FakeSession([FakeResponse(200, payload)])
        client = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        result = client.complete(request())
        assert result.estimated
        assert result.input_tokens == estimate_tokens("say hello")

    def test_api_key_header(self, monkeypatch):
        monkeypatch.setenv("EVOASTAR_API_KEY", "sk-secret")
        session = FakeSession([FakeResponse(200, ok_payload())])
        client = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        client.complete(request())
        assert session.calls[0]["headers"]["Authorization"] == "Bearer sk-secret"


class TestReplayClient:
    def fixture_file(self, tmp_path, entries):
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(entries))
        return path

    def test_replays_recorded_text(self, tmp_path):
        entries = [
            {
                "prompt_sha256": prompt_sha256("p1"),
                "response_text": "r1",
                "input_tokens": 3,
                "output_tokens": 4,
            }
        ]
        client = ReplayClient(self.fixture_file(tmp_path, entries))
        result = client.complete(CompletionRequest(model="m", prompt="p1"))
        assert result.text == "r1"
        assert (result.input_tokens, result.output_tokens) == (3, 4)

    def test_unknown_prompt_fails_loudly(self, tmp_path):
        client = ReplayClient(self.fixture_file(tmp_path, []))
        with pytest.raises(MissingFixtureError):
            client.complete(CompletionRequest(model="m", prompt="unseen"))

    def test_duplicate_prompts_consumed_in_order(self, tmp_path):
        digest = prompt_sha256("same")
        entries = [
            {"prompt_sha256": digest, "response_text": "first"},
            {"prompt_sha256": digest, "response_text": "second"},
        ]
        client = ReplayClient(self.fixture_file(tmp_path, entries))
        req = CompletionRequest(model="m", prompt="same")
        assert client.complete(req).text == "first"
        assert client.complete(req).text == "second"
        with pytest.raises(MissingFixtureError):
            client.complete(req)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFixtureError):
            ReplayClient(tmp_path / "nope.json")

    def test_fast_forward_skips_consumed_entries(self, tmp_path):
        digest = prompt_sha256("same")
        entries = [
            {"prompt_sha256": digest, "response_text": "first"},
            {"prompt_sha256": digest, "response_text": "second"},
        ]
        client = ReplayClient(self.fixture_file(tmp_path, entries))
        client.fast_forward([digest])
        assert client.complete(CompletionRequest(model="m", prompt="same")).text == "second"
        with pytest.raises(MissingFixtureError):
            client.fast_forward([digest, digest])


class TestRecordingClient:
    def test_roundtrip_through_replay(self, tmp_path):
        session = FakeSession([FakeResponse(200, ok_payload("answer"))])
        live = HttpChatClient("http://example/v1", session=session, sleep=lambda s: None)
        recorder = RecordingClient(live)
        recorder.complete(request("the prompt"))
        path = recorder.save(tmp_path / "recorded.json")

        replay = ReplayClient(path)
        result = replay.complete(request("the prompt"))
        assert result.text == "answer"
        assert (result.input_tokens, result.output_tokens) == (12, 7)


class TestUsageReport:
    def write_log(self, tmp_path, events):
        path = tmp_path / "run_log.jsonl"
        path.write_text("\n".join(json.dumps(e) for e in events) + "\n")
        return path

    def test_means_per_problem_mode(self, tmp_path):
        events = [
            {"event": "llm_response", "problem": "upmp", "mode": "eoh", "input_tokens": 100, "output_tokens": 10},
            {"event": "llm_response", "problem": "upmp", "mode": "eoh", "input_tokens": 200, "output_tokens": 30},
            {"event": "other", "problem": "upmp", "mode": "eoh", "input_tokens": 999, "output_tokens": 999},
        ]
        report = usage_report(self.write_log(tmp_path, events))
        assert report[("upmp", "eoh")]["count"] == 2
        assert report[("upmp", "eoh")]["mean_input_tokens"] == 150.0
        assert report[("upmp", "eoh")]["mean_output_tokens"] == 20.0

    def test_single_prompt_means_equal_counts(self, tmp_path):
        events = [
            {"event": "llm_response", "problem": "spp", "mode": "a_ceoh", "input_tokens": 42, "output_tokens": 17}
        ]
        report = usage_report(self.write_log(tmp_path, events))
        assert report[("spp", "a_ceoh")] == {
            "count": 1,
            "mean_input_tokens": 42.0,
            "mean_output_tokens": 17.0,
        }

    def test_empty_log_empty_report(self, tmp_path):
        assert usage_report(tmp_path / "missing.jsonl") == {}
        empty = tmp_path / "run_log.jsonl"
        empty.write_text("")
        assert usage_report(empty) == {}

    def test_totals_are_additive(self, tmp_path):
        events = [
            {"event": "llm_response", "problem": "upmp", "mode": "eoh", "input_tokens": t, "output_tokens": 1}
            for t in (10, 20, 30)
        ]
        report = usage_report(self.write_log(tmp_path, events))
        stats = report[("upmp", "eoh")]
        assert stats["mean_input_tokens"] * stats["count"] == 60
