"""Shared request/response types and errors for the model backends."""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field

from . import schemas
from ..image import ImageBuffer, png_bytes


class GatewayError(Exception):
    """Base class for backend failures."""


class TransportError(GatewayError):
    """Network/HTTP failure after retries were exhausted."""


class MalformedOutputError(GatewayError):
    """Structured output failed schema validation after the repair pass."""

    def __init__(self, schema_id: str, errors: list[str]):
        self.schema_id = schema_id
        self.errors = errors
        super().__init__(f"output does not satisfy schema {schema_id!r}: " + "; ".join(errors))


class ReplayMismatchError(GatewayError):
    """A replayed request does not match the recorded exchange."""


def canonical_json(obj) -> str:
    """Single canonical byte representation used for digests and
    transcript lines: sorted keys, no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True)
class AttachedImage:
    role: str  # source | current | histogram | reference
    media_type: str
    base64_data: str
    digest: str  # raw-pixel content digest

    VALID_ROLES = ("source", "current", "histogram", "reference")


def attach_image(img: ImageBuffer, role: str) -> AttachedImage:
    return AttachedImage(
        role=role,
        media_type="image/png",
        base64_data=base64.b64encode(png_bytes(img)).decode("ascii"),
        digest=img.digest(),
    )


@dataclass(frozen=True)
class BackendRequest:
    """One model exchange: prompts, attached images, and the machine
    readable stage inputs that deterministic backends consume."""

    stage: str
    system_prompt: str = ""
    user_prompt: str = ""
    images: tuple[AttachedImage, ...] = ()
    schema_id: str | None = None
    temperature: float = 0.0
    max_tokens: int = 1024
    structured: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0


@dataclass(frozen=True)
class BackendResponse:
    text: str
    payload: dict | None = None
    usage: TokenUsage = field(default_factory=TokenUsage)
    latency_seconds: float = 0.0


def validate_request(request: BackendRequest) -> None:
    if not request.system_prompt and not request.user_prompt:
        raise GatewayError("request must carry at least one prompt")
    if not (0.0 <= request.temperature <= 2.0):
        raise GatewayError(f"temperature {request.temperature!r} outside [0, 2]")
    if request.schema_id is not None and not schemas.is_registered(request.schema_id):
        raise GatewayError(f"unknown structured-output schema {request.schema_id!r}")
    for img in request.images:
        if img.role not in AttachedImage.VALID_ROLES:
            raise GatewayError(f"unknown image role {img.role!r}")


def ensure_valid_payload(schema_id: str | None, payload) -> None:
    """Gateway-wide invariant: a response returned as non-malformed must
    satisfy its registered schema."""
    if schema_id is None:
        return
    errors = schemas.validation_errors(schema_id, payload)
    if errors:
        raise MalformedOutputError(schema_id, errors)


def request_digest(request: BackendRequest) -> str:
    """Binds recorded exchanges to replayed requests: stage, schema, and
    the content digests of every attached image, in order."""
    doc = {
        "stage": request.stage,
        "schema_id": request.schema_id,
        "images": [{"role": im.role, "digest": im.digest} for im in request.images],
    }
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()
