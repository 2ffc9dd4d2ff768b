"""Shared HTTP client for chat-completions-style text providers.

Used by the remote planner and the remote paraphraser. Wire format:
POST {endpoint} with {"model": ..., "messages": [{"role", "content"}]},
response {"choices": [{"message": {"content": ...}}]}.
"""

from __future__ import annotations

import httpx

from .errors import ProviderError, TransportError

DEFAULT_TIMEOUT_S = 10.0


def chat_complete(
    endpoint: str,
    model: str,
    prompt: str,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    transport=None,
) -> str:
    payload = {"model": model, "messages": [{"role": "user", "content": prompt}]}
    try:
        with httpx.Client(timeout=timeout_s, transport=transport) as client:
            response = client.post(endpoint, json=payload)
    except httpx.HTTPError as exc:
        raise TransportError(str(exc)) from exc
    if response.status_code != 200:
        raise ProviderError(response.status_code, response.text)
    body = response.json()
    try:
        return body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise ProviderError(200, f"malformed completion body: {exc}") from exc
