"""Scripted backends: canned per-stage responses for fixtures and tests."""

from __future__ import annotations

from collections import deque

from .base import (
    BackendRequest,
    BackendResponse,
    GatewayError,
    canonical_json,
    ensure_valid_payload,
    validate_request,
)


class ScriptedBackend:
    """Pops pre-authored payloads per stage, in call order."""

    name = "scripted"
    deterministic = True

    def __init__(self, responses: dict[str, list[dict]]):
        self._queues = {stage: deque(payloads) for stage, payloads in responses.items()}

    def complete(self, request: BackendRequest) -> BackendResponse:
        validate_request(request)
        queue = self._queues.get(request.stage)
        if not queue:
            raise GatewayError(f"scripted backend has no response left for stage {request.stage!r}")
        payload = queue.popleft()
        ensure_valid_payload(request.schema_id, payload)
        return BackendResponse(text=canonical_json(payload), payload=payload)


class CallbackBackend:
    """Delegates payload construction to a callable(stage, structured)."""

    name = "callback"
    deterministic = True

    def __init__(self, fn):
        self._fn = fn

    def complete(self, request: BackendRequest) -> BackendResponse:
        validate_request(request)
        payload = self._fn(request.stage, request.structured)
        ensure_valid_payload(request.schema_id, payload)
        return BackendResponse(text=canonical_json(payload), payload=payload)
