"""Chat-completion backends behind one small interface.

Two implementations: a real client for any OpenAI-compatible endpoint, and
a deterministic seeded mock for tests and offline use. Generation defaults
are fixed (temperature 1, max_tokens 256, top_p 1, zero penalties) and are
only changed through explicit configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import time
import uuid
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Protocol

import httpx

from .model import ElementKind

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4"
DEFAULT_TIMEOUT = 30.0

ENV_BASE_URL = "CPD_LLM_BASE_URL"
ENV_API_KEY = "CPD_LLM_API_KEY"
ENV_MODEL = "CPD_LLM_MODEL"


class GatewayError(Exception):
    """Base class for completion-backend failures."""


class AuthError(GatewayError):
    pass


class RateLimited(GatewayError):
    def __init__(self, message: str, retry_after: float | None = None) -> None:
        super().__init__(message)
        self.retry_after = retry_after


class GatewayTimeout(GatewayError):
    pass


class TransportError(GatewayError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 1.0
    max_tokens: int = 256
    top_p: float = 1.0
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    #: None means "use the backend's configured model".
    model: str | None = None


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    user: str
    params: GenerationParams = GenerationParams()


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    backend: str
    request_id: str
    model: str | None = None
    prompt_tokens: int | None = None
    completion_tokens: int | None = None
    latency_s: float | None = None


class ChatBackend(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


def build_chat_payload(request: CompletionRequest, default_model: str) -> dict:
    """Outbound JSON body for a chat-completions call."""
    messages = []
    if request.system:
        messages.append({"role": "system", "content": request.system})
    messages.append({"role": "user", "content": request.user})
    params = request.params
    return {
        "model": params.model or default_model,
        "messages": messages,
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
        "top_p": params.top_p,
        "frequency_penalty": params.frequency_penalty,
        "presence_penalty": params.presence_penalty,
    }


class OpenAIChatClient:
    """Client for an OpenAI-compatible `/chat/completions` endpoint.

    Every call is bounded by a timeout. Transport-level failures (connect
    errors, 5xx responses) are retried exactly once; auth failures, rate
    limits, and timeouts are surfaced immediately so callers can react.
    Safe for concurrent use from multiple threads.
    """

    def __init__(
        self,
        api_key: str,
        base_url: str = DEFAULT_BASE_URL,
        model: str = DEFAULT_MODEL,
        timeout: float = DEFAULT_TIMEOUT,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        if not api_key:
            raise AuthError(
                f"no API key configured (set {ENV_API_KEY} or use the mock backend)"
            )
        self.model = model
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=timeout,
            transport=transport,
        )

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        payload = build_chat_payload(request, self.model)
        started = time.monotonic()
        response = self._post_with_retry(payload)
        latency = time.monotonic() - started
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion response: {exc}") from exc
        usage = data.get("usage") or {}
        return CompletionResponse(
            text=text,
            backend="openai-compatible",
            request_id=str(data.get("id") or uuid.uuid4()),
            model=data.get("model"),
            prompt_tokens=usage.get("prompt_tokens"),
            completion_tokens=usage.get("completion_tokens"),
            latency_s=latency,
        )

    def _post_with_retry(self, payload: dict) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(2):
            try:
                response = self._client.post("/chat/completions", json=payload)
            except httpx.TimeoutException as exc:
                raise GatewayTimeout(f"completion timed out: {exc}") from exc
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"authentication failed ({response.status_code})")
            if response.status_code == 429:
                retry_after = _parse_retry_after(response.headers.get("retry-after"))
                raise RateLimited("rate limited by backend", retry_after=retry_after)
            if response.status_code >= 500:
                last_error = TransportError(
                    f"server error {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"unexpected status {response.status_code}: {response.text[:200]}"
                )
            return response
        raise TransportError(f"transport failure after retry: {last_error}")

    def close(self) -> None:
        self._client.close()


def _parse_retry_after(raw: str | None) -> float | None:
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        return None


def client_from_env(
    timeout: float = DEFAULT_TIMEOUT,
    transport: httpx.BaseTransport | None = None,
) -> OpenAIChatClient:
    """Build the real client from CPD_LLM_* environment variables."""
    return OpenAIChatClient(
        api_key=os.environ.get(ENV_API_KEY, ""),
        base_url=os.environ.get(ENV_BASE_URL, DEFAULT_BASE_URL),
        model=os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        timeout=timeout,
        transport=transport,
    )


def load_phrase_bank() -> dict[str, list[str]]:
    data = resources.files("cpdkit").joinpath("data/phrases.json").read_text("utf-8")
    return json.loads(data)


_TARGET_RE = re.compile(r"recommend 5 possible ([a-z ]+):", re.IGNORECASE)
_BULLET_RE = re.compile(r"^- [a-z ]+: (.*)$")


class MockChatBackend:
    """Deterministic offline backend.

    Picks five phrases from a per-kind bank, keyed by a digest of the seed,
    the requested kind, and the context labels found in the prompt, so the
    same (seed, prompt) pair always yields the same numbered list.
    """

    def __init__(
        self, seed: int = 0, phrases: Mapping[str, list[str]] | None = None
    ) -> None:
        self.seed = seed
        self._bank = dict(phrases) if phrases is not None else load_phrase_bank()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        kind = self._target_kind(request.user)
        labels = [
            match.group(1)
            for line in request.user.splitlines()
            if (match := _BULLET_RE.match(line))
        ]
        if kind is not None:
            pool = self._bank[kind.value]
            key_kind = kind.value
        else:
            pool = sorted({p for phrases in self._bank.values() for p in phrases})
            key_kind = "*"
        digest = hashlib.sha256(
            "\n".join([str(self.seed), key_kind, *labels]).encode("utf-8")
        ).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        picks = rng.sample(pool, 5)
        text = "\n".join(f"{i}. {phrase}" for i, phrase in enumerate(picks, start=1))
        return CompletionResponse(
            text=text,
            backend="mock",
            request_id=digest.hex()[:16],
            model="mock",
        )

    @staticmethod
    def _target_kind(prompt: str) -> ElementKind | None:
        match = _TARGET_RE.search(prompt)
        if match is None:
            return None
        name = match.group(1).strip().lower().replace(" ", "_")
        try:
            return ElementKind(name)
        except ValueError:
            return None
