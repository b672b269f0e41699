"""Uniform interface to vision-language backends: a live HTTP backend,
a deterministic offline heuristic, and transcript record/replay."""

from .base import (
    AttachedImage,
    BackendRequest,
    BackendResponse,
    GatewayError,
    MalformedOutputError,
    ReplayMismatchError,
    TokenUsage,
    TransportError,
    attach_image,
    canonical_json,
    request_digest,
    validate_request,
)
from .heuristic import HeuristicBackend
from .openai_compat import OpenAICompatBackend
from .scripted import CallbackBackend, ScriptedBackend
from .transcript import (
    RecordingBackend,
    ReplayBackend,
    Transcript,
    TranscriptEntry,
    TranscriptFormatError,
    load_transcript,
    noncanonical_lines,
)

__all__ = [
    "AttachedImage",
    "BackendRequest",
    "BackendResponse",
    "CallbackBackend",
    "attach_image",
    "GatewayError",
    "HeuristicBackend",
    "MalformedOutputError",
    "OpenAICompatBackend",
    "RecordingBackend",
    "ReplayBackend",
    "ReplayMismatchError",
    "ScriptedBackend",
    "TokenUsage",
    "Transcript",
    "TranscriptEntry",
    "TranscriptFormatError",
    "TransportError",
    "canonical_json",
    "load_transcript",
    "noncanonical_lines",
    "request_digest",
    "validate_request",
]
