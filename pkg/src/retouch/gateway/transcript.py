"""Session transcripts: JSONL record/replay of backend exchanges.

File layout, one canonical-JSON object per line:
    {"kind": "meta", ...}                      required first line
    {"kind": "exchange", "stage": ..., "digest": ..., "schema_id": ...,
     "response": {"text": ..., "payload": ...}}
    {"kind": "outcome", ...}                   optional trailing line

Lines are written in canonical form (sorted keys, no extra whitespace),
so loading a transcript and saving it again is byte-stable, and any
single-byte edit either breaks a line's canonical form or changes its
parsed content.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import json

from .base import (
    BackendRequest,
    BackendResponse,
    GatewayError,
    ReplayMismatchError,
    canonical_json,
    ensure_valid_payload,
    request_digest,
    validate_request,
)


class TranscriptFormatError(GatewayError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TranscriptEntry:
    stage: str
    digest: str
    schema_id: str | None
    response_text: str
    response_payload: dict | None

    def to_doc(self) -> dict:
        return {
            "kind": "exchange",
            "stage": self.stage,
            "digest": self.digest,
            "schema_id": self.schema_id,
            "response": {"text": self.response_text, "payload": self.response_payload},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TranscriptEntry":
        response = doc["response"]
        return cls(
            stage=doc["stage"],
            digest=doc["digest"],
            schema_id=doc.get("schema_id"),
            response_text=response["text"],
            response_payload=response.get("payload"),
        )


@dataclass
class Transcript:
    meta: dict = field(default_factory=dict)
    entries: list[TranscriptEntry] = field(default_factory=list)
    outcome: dict | None = None

    def record(self, request: BackendRequest, response: BackendResponse) -> None:
        self.entries.append(TranscriptEntry(
            stage=request.stage,
            digest=request_digest(request),
            schema_id=request.schema_id,
            response_text=response.text,
            response_payload=response.payload,
        ))

    def lines(self) -> list[str]:
        out = [canonical_json({"kind": "meta", **self.meta})]
        out.extend(canonical_json(e.to_doc()) for e in self.entries)
        if self.outcome is not None:
            out.append(canonical_json({"kind": "outcome", **self.outcome}))
        return out

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            for line in self.lines():
                fh.write(line + "\n")


def load_transcript(path) -> Transcript:
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    if not raw_lines:
        raise TranscriptFormatError("empty transcript")
    transcript = Transcript()
    for idx, raw in enumerate(raw_lines, start=1):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TranscriptFormatError(f"malformed JSON: {exc.msg}", idx) from exc
        if not isinstance(doc, dict) or "kind" not in doc:
            raise TranscriptFormatError("each line must be an object with a 'kind'", idx)
        kind = doc["kind"]
        if kind == "meta":
            if idx != 1:
                raise TranscriptFormatError("meta line must come first", idx)
            transcript.meta = {k: v for k, v in doc.items() if k != "kind"}
        elif kind == "exchange":
            try:
                transcript.entries.append(TranscriptEntry.from_doc(doc))
            except (KeyError, TypeError) as exc:
                raise TranscriptFormatError(f"incomplete exchange record: {exc}", idx) from exc
        elif kind == "outcome":
            transcript.outcome = {k: v for k, v in doc.items() if k != "kind"}
        else:
            raise TranscriptFormatError(f"unknown record kind {kind!r}", idx)
    if not transcript.meta and raw_lines:
        raise TranscriptFormatError("missing meta line", 1)
    return transcript


def noncanonical_lines(path) -> list[int]:
    """Line numbers whose bytes differ from the canonical serialization
    of their parsed content. Any byte-level tamper lands here or fails
    to parse outright."""
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    bad = []
    for idx, raw in enumerate(raw_lines, start=1):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError:
            bad.append(idx)
            continue
        if canonical_json(doc) != raw:
            bad.append(idx)
    return bad


class ReplayBackend:
    """Serves recorded responses in order, bound to request digests.
    Never touches the network."""

    name = "replay"
    deterministic = True

    def __init__(self, transcript: Transcript):
        self._transcript = transcript
        self._cursor = 0

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self._transcript.entries)

    def skip(self, count: int) -> None:
        """Advance past exchanges a resumed session already consumed."""
        if count < 0 or self._cursor + count > len(self._transcript.entries):
            raise ReplayMismatchError(f"cannot skip {count} exchanges from {self._cursor}")
        self._cursor += count

    def complete(self, request: BackendRequest) -> BackendResponse:
        validate_request(request)
        if self.exhausted:
            raise ReplayMismatchError(
                f"transcript exhausted: no recorded exchange for stage {request.stage!r}")
        entry = self._transcript.entries[self._cursor]
        digest = request_digest(request)
        if entry.stage != request.stage:
            raise ReplayMismatchError(
                f"stage mismatch at exchange {self._cursor + 1}: "
                f"recorded {entry.stage!r}, requested {request.stage!r}")
        if entry.digest != digest:
            raise ReplayMismatchError(
                f"request digest mismatch at exchange {self._cursor + 1} "
                f"(stage {request.stage!r}): recorded {entry.digest[:12]}..., "
                f"computed {digest[:12]}...")
        ensure_valid_payload(request.schema_id, entry.response_payload)
        self._cursor += 1
        return BackendResponse(text=entry.response_text, payload=entry.response_payload)


class RecordingBackend:
    """Wraps another backend and appends every exchange to a transcript."""

    name = "recording"

    def __init__(self, inner, transcript: Transcript):
        self._inner = inner
        self.transcript = transcript

    @property
    def deterministic(self) -> bool:
        return getattr(self._inner, "deterministic", False)

    def complete(self, request: BackendRequest) -> BackendResponse:
        response = self._inner.complete(request)
        self.transcript.record(request, response)
        return response
