from __future__ import annotations

import json

import httpx
import pytest

from cpdkit.gateway import (
    AuthError,
    CompletionRequest,
    GatewayTimeout,
    GenerationParams,
    MockChatBackend,
    OpenAIChatClient,
    RateLimited,
    TransportError,
    build_chat_payload,
    client_from_env,
    load_phrase_bank,
)
from cpdkit.model import ElementKind

BARRIER_PROMPT = (
    "Based on the distal outcome the user have input, "
    "recommend 5 possible barrier:\n- distal outcome: Increased physical activity"
)


def completion_response(text="1. a\n2. b"):
    return {
        "id": "chatcmpl-123",
        "model": "gpt-4-0613",
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 5},
    }


class RecordingTransport(httpx.BaseTransport):
    """Records outbound requests and plays back scripted results."""

    def __init__(self, script):
        self.script = list(script)
        self.requests: list[httpx.Request] = []

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        action = self.script.pop(0) if self.script else completion_response()
        if isinstance(action, Exception):
            raise action
        if isinstance(action, int):
            return httpx.Response(action, json={"error": "scripted"})
        return httpx.Response(200, json=action)

    def payload(self, index=0) -> dict:
        return json.loads(self.requests[index].content.decode("utf-8"))


def make_client(script, **kwargs):
    transport = RecordingTransport(script)
    client = OpenAIChatClient(
        api_key="test-key", transport=transport, **kwargs
    )
    return client, transport


class TestGenerationParams:
    def test_defaults(self):
        params = GenerationParams()
        assert params.temperature == 1.0
        assert params.max_tokens == 256
        assert params.top_p == 1.0
        assert params.frequency_penalty == 0.0
        assert params.presence_penalty == 0.0

    def test_payload_carries_all_five_parameters(self):
        payload = build_chat_payload(
            CompletionRequest(system="defs", user="ask"), default_model="gpt-4"
        )
        assert payload["temperature"] == 1
        assert payload["max_tokens"] == 256
        assert payload["top_p"] == 1
        assert payload["frequency_penalty"] == 0
        assert payload["presence_penalty"] == 0
        assert payload["model"] == "gpt-4"
        assert payload["messages"] == [
            {"role": "system", "content": "defs"},
            {"role": "user", "content": "ask"},
        ]


class TestOpenAIChatClient:
    def test_wire_payload_and_auth_header(self):
        client, transport = make_client([completion_response("hello")])
        response = client.complete(CompletionRequest(system="defs", user="ask"))
        assert response.text == "hello"
        assert response.backend == "openai-compatible"
        assert response.request_id == "chatcmpl-123"
        sent = transport.payload()
        assert sent["temperature"] == 1
        assert sent["max_tokens"] == 256
        assert sent["top_p"] == 1
        assert sent["frequency_penalty"] == 0
        assert sent["presence_penalty"] == 0
        request = transport.requests[0]
        assert request.headers["authorization"] == "Bearer test-key"
        assert request.url.path.endswith("/chat/completions")

    def test_model_override_via_params(self):
        client, transport = make_client([completion_response()])
        client.complete(
            CompletionRequest(
                system="", user="ask", params=GenerationParams(model="small-model")
            )
        )
        assert transport.payload()["model"] == "small-model"

    def test_invalid_credential_is_auth_error(self):
        client, transport = make_client([401])
        with pytest.raises(AuthError):
            client.complete(CompletionRequest(system="", user="ask"))
        assert len(transport.requests) == 1

    def test_rate_limit_carries_retry_after(self):
        transport = RecordingTransport([])

        def handler(request):
            transport.requests.append(request)
            return httpx.Response(429, headers={"retry-after": "12"})

        transport.handle_request = handler  # type: ignore[assignment]
        client = OpenAIChatClient(api_key="k", transport=transport)
        with pytest.raises(RateLimited) as excinfo:
            client.complete(CompletionRequest(system="", user="ask"))
        assert excinfo.value.retry_after == 12.0
        assert len(transport.requests) == 1

    def test_timeout_is_surfaced_without_retry(self):
        client, transport = make_client([httpx.ReadTimeout("slow")])
        with pytest.raises(GatewayTimeout):
            client.complete(CompletionRequest(system="", user="ask"))
        assert len(transport.requests) == 1

    def test_transient_transport_failure_is_retried_once(self):
        client, transport = make_client(
            [httpx.ConnectError("refused"), completion_response("ok")]
        )
        response = client.complete(CompletionRequest(system="", user="ask"))
        assert response.text == "ok"
        assert len(transport.requests) == 2

    def test_two_transport_failures_raise(self):
        client, transport = make_client(
            [httpx.ConnectError("refused"), httpx.ConnectError("refused")]
        )
        with pytest.raises(TransportError):
            client.complete(CompletionRequest(system="", user="ask"))
        assert len(transport.requests) == 2

    def test_server_error_is_retried_once(self):
        client, transport = make_client([502, completion_response("ok")])
        response = client.complete(CompletionRequest(system="", user="ask"))
        assert response.text == "ok"
        assert len(transport.requests) == 2

    def test_missing_key_fails_fast(self, monkeypatch):
        monkeypatch.delenv("CPD_LLM_API_KEY", raising=False)
        with pytest.raises(AuthError):
            client_from_env()


class TestMockChatBackend:
    def test_identical_seed_and_prompt_are_deterministic(self):
        first = MockChatBackend(seed=42).complete(
            CompletionRequest(system="defs", user=BARRIER_PROMPT)
        )
        second = MockChatBackend(seed=42).complete(
            CompletionRequest(system="defs", user=BARRIER_PROMPT)
        )
        assert first.text == second.text
        assert first.request_id == second.request_id

    def test_different_seeds_differ(self):
        first = MockChatBackend(seed=1).complete(
            CompletionRequest(system="", user=BARRIER_PROMPT)
        )
        second = MockChatBackend(seed=2).complete(
            CompletionRequest(system="", user=BARRIER_PROMPT)
        )
        assert first.text != second.text

    def test_produces_five_numbered_lines_from_the_right_bank(self):
        response = MockChatBackend(seed=7).complete(
            CompletionRequest(system="", user=BARRIER_PROMPT)
        )
        lines = response.text.splitlines()
        assert len(lines) == 5
        bank = load_phrase_bank()["barrier"]
        for index, line in enumerate(lines, start=1):
            prefix, phrase = line.split(". ", 1)
            assert prefix == str(index)
            assert phrase in bank

    def test_context_changes_the_selection(self):
        other_prompt = BARRIER_PROMPT.replace(
            "Increased physical activity", "Increased transit ridership"
        )
        backend = MockChatBackend(seed=7)
        first = backend.complete(CompletionRequest(system="", user=BARRIER_PROMPT))
        second = backend.complete(CompletionRequest(system="", user=other_prompt))
        assert first.text != second.text

    def test_unrecognized_prompt_still_answers_deterministically(self):
        backend = MockChatBackend(seed=3)
        request = CompletionRequest(system="", user="tell me a story")
        assert backend.complete(request).text == backend.complete(request).text


def test_phrase_bank_covers_every_kind_generously():
    bank = load_phrase_bank()
    assert set(bank) == {kind.value for kind in ElementKind}
    for kind, phrases in bank.items():
        assert len(phrases) >= 20, kind
        assert len({p.casefold() for p in phrases}) == len(phrases), kind
