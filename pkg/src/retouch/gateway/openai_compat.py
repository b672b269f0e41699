"""Live chat-completions backend (OpenAI-compatible wire shape).

Transport failures retry up to three times with exponential backoff.
Structured output that fails schema validation triggers exactly one
repair re-prompt carrying the validator's error text; a second failure
raises MalformedOutputError.
"""

from __future__ import annotations

import json
import time

import httpx

from . import schemas
from .base import (
    BackendRequest,
    BackendResponse,
    MalformedOutputError,
    TokenUsage,
    TransportError,
    validate_request,
)

MAX_TRANSPORT_ATTEMPTS = 3


def _strip_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        first_newline = stripped.find("\n")
        if first_newline != -1 and stripped.endswith("```"):
            return stripped[first_newline + 1:-3].strip()
    return stripped


class OpenAICompatBackend:
    name = "openai_compatible"
    deterministic = False

    def __init__(self, base_url: str, api_key: str, model: str, *,
                 timeout: float = 120.0, backoff_base: float = 0.5,
                 transport: httpx.BaseTransport | None = None,
                 sleep=time.sleep):
        self.model = model
        self._backoff_base = backoff_base
        self._sleep = sleep
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"), headers=headers,
            timeout=timeout, transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def complete(self, request: BackendRequest) -> BackendResponse:
        validate_request(request)
        messages = self._build_messages(request)
        started = time.perf_counter()
        text, usage = self._call(self._body(request, messages))
        if request.schema_id is None:
            return BackendResponse(text=text, usage=usage,
                                   latency_seconds=time.perf_counter() - started)

        payload, errors = self._parse_structured(request.schema_id, text)
        if errors:
            repair = messages + [
                {"role": "assistant", "content": text},
                {"role": "user", "content": (
                    "The previous reply was not valid against the required JSON schema. "
                    "Validator errors: " + "; ".join(errors) +
                    ". Reply again with corrected JSON only."
                )},
            ]
            text, usage = self._call(self._body(request, repair))
            payload, errors = self._parse_structured(request.schema_id, text)
            if errors:
                raise MalformedOutputError(request.schema_id, errors)
        return BackendResponse(text=text, payload=payload, usage=usage,
                               latency_seconds=time.perf_counter() - started)

    def _body(self, request: BackendRequest, messages: list[dict]) -> dict:
        body = {
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.schema_id is not None:
            body["response_format"] = {
                "type": "json_schema",
                "json_schema": {
                    "name": request.schema_id,
                    "schema": schemas.get_schema(request.schema_id),
                    "strict": False,
                },
            }
        return body

    @staticmethod
    def _build_messages(request: BackendRequest) -> list[dict]:
        messages: list[dict] = []
        if request.system_prompt:
            messages.append({"role": "system", "content": request.system_prompt})
        parts: list[dict] = []
        if request.user_prompt:
            parts.append({"type": "text", "text": request.user_prompt})
        for img in request.images:
            parts.append({
                "type": "image_url",
                "image_url": {"url": f"data:{img.media_type};base64,{img.base64_data}"},
            })
        messages.append({"role": "user", "content": parts})
        return messages

    def _call(self, body: dict) -> tuple[str, TokenUsage]:
        last_error: Exception | None = None
        for attempt in range(MAX_TRANSPORT_ATTEMPTS):
            if attempt:
                self._sleep(self._backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.post("/chat/completions", json=body)
                response.raise_for_status()
                doc = response.json()
                text = doc["choices"][0]["message"]["content"]
                usage_doc = doc.get("usage") or {}
                usage = TokenUsage(
                    prompt_tokens=int(usage_doc.get("prompt_tokens", 0)),
                    completion_tokens=int(usage_doc.get("completion_tokens", 0)),
                )
                return text, usage
            except (httpx.HTTPError, KeyError, IndexError, json.JSONDecodeError) as exc:
                last_error = exc
        raise TransportError(f"backend unreachable after {MAX_TRANSPORT_ATTEMPTS} attempts: {last_error}")

    @staticmethod
    def _parse_structured(schema_id: str, text: str) -> tuple[dict | None, list[str]]:
        try:
            payload = json.loads(_strip_fences(text))
        except json.JSONDecodeError as exc:
            return None, [f"not valid JSON: {exc.msg} at line {exc.lineno}"]
        errors = schemas.validation_errors(schema_id, payload)
        return (payload, []) if not errors else (None, errors)
