"""Remote model backend plumbing.

One small HTTP client shared by every semantic stage (verifier, visual
analyzer, taxonomy). Speaks a chat-completions style JSON protocol:
POST ``{model, messages, temperature}`` and read back
``choices[0].message.content`` plus a ``usage`` block.

The API key is always read from an environment variable named in the
config; configuration files carry only the variable's *name*, never the
secret itself. A ``transport`` callable can be injected for tests so no
network or key is needed.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

from ghostink.errors import (
    BackendUnavailableError,
    ContextOverflowError,
    MalformedBackendResponseError,
)


@dataclass(slots=True)
class BackendConfig:
    endpoint: str = "https://api.example.invalid/v1/chat/completions"
    model: str = "screening-judge-1"
    api_key_env: str = "GHOSTINK_API_KEY"
    timeout_s: float = 30.0
    max_retries: int = 3
    backoff_s: float = 0.5
    max_input_chars: int = 8000
    temperature: float = 0.0
    prompt_version: str = "v1"


@dataclass(slots=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def add(self, other: "TokenUsage") -> None:
        self.prompt_tokens += other.prompt_tokens
        self.completion_tokens += other.completion_tokens

    def cost(self, prompt_per_1k: float, completion_per_1k: float) -> float:
        return (
            self.prompt_tokens / 1000.0 * prompt_per_1k
            + self.completion_tokens / 1000.0 * completion_per_1k
        )


def _default_transport(url: str, headers: dict, payload: dict, timeout: float):
    import requests

    try:
        response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise ConnectionError(str(exc)) from exc
    return response.status_code, response.content


class RemoteBackend:
    """Chat client with bounded retries and token accounting."""

    def __init__(self, config: BackendConfig, transport=None, sleep=time.sleep):
        self.config = config
        self.transport = transport or _default_transport
        self.sleep = sleep
        self.usage = TokenUsage()

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise BackendUnavailableError(
                f"environment variable {self.config.api_key_env} is not set; "
                "remote backends read credentials only from the environment"
            )
        return key

    def chat(self, system: str, user: str) -> str:
        """Send one exchange; returns the assistant text."""
        if len(system) + len(user) > self.config.max_input_chars:
            raise ContextOverflowError(
                f"input of {len(system) + len(user)} chars exceeds the "
                f"{self.config.max_input_chars}-char budget"
            )
        headers = {
            "Authorization": f"Bearer {self._api_key()}",
            "Content-Type": "application/json",
        }
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        last_error = "no attempts made"
        for attempt in range(max(1, self.config.max_retries)):
            if attempt:
                self.sleep(self.config.backoff_s * (2 ** (attempt - 1)))
            try:
                status, body = self.transport(
                    self.config.endpoint, headers, payload, self.config.timeout_s
                )
            except ConnectionError as exc:
                last_error = f"transport error: {exc}"
                continue
            if status == 200:
                return self._extract_content(body)
            if status in (408, 429) or status >= 500:
                last_error = f"retriable status {status}"
                continue
            raise BackendUnavailableError(
                f"backend rejected request with status {status}"
            )
        raise BackendUnavailableError(
            f"backend unreachable after {self.config.max_retries} attempts "
            f"({last_error})"
        )

    def _extract_content(self, body: bytes) -> str:
        try:
            parsed = json.loads(body)
            content = parsed["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError):
            raise MalformedBackendResponseError(
                "response body is not a chat completion"
            ) from None
        usage = parsed.get("usage") or {}
        self.usage.add(TokenUsage(
            prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
            completion_tokens=int(usage.get("completion_tokens", 0) or 0),
        ))
        if not isinstance(content, str):
            raise MalformedBackendResponseError("message content is not text")
        return content

    def chat_json(self, system: str, user: str) -> dict:
        """Chat and parse the reply as a JSON object, tolerating code fences."""
        content = self.chat(system, user).strip()
        if content.startswith("```"):
            content = content.strip("`")
            if content.startswith("json"):
                content = content[4:]
        try:
            parsed = json.loads(content)
        except json.JSONDecodeError:
            raise MalformedBackendResponseError(
                f"backend reply is not JSON: {content[:120]!r}"
            ) from None
        if not isinstance(parsed, dict):
            raise MalformedBackendResponseError("backend reply is not an object")
        return parsed
