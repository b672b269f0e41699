"""Re-execution of recorded sessions and divergence verification.

Verification layers, every one of which must pass:
  1. every transcript line parses and is in canonical byte form;
  2. the outcome block's transcript digest matches the meta+exchange lines;
  3. the source image digest matches the recording;
  4. the session replays to completion (request digests bind each
     exchange to the stage and the exact attached pixel content);
  5. every produced iteration equals the recorded outcome: parameters
     bit-exact, verdict flags, critiques, rendered-image digests, and
     the final outcome label.
Any single-byte edit to the file trips at least one layer.
"""

from __future__ import annotations

import hashlib

from . import params as P
from .agent import Orchestrator, SessionState, Stage
from .gateway import ReplayBackend, Transcript, TranscriptFormatError, canonical_json, load_transcript, noncanonical_lines
from .image import ImageBuffer


def transcript_body_digest(transcript: Transcript) -> str:
    """Digest over the canonical meta and exchange lines (the outcome
    block itself is excluded; it is where the digest is stored)."""
    lines = [canonical_json({"kind": "meta", **transcript.meta})]
    lines.extend(canonical_json(e.to_doc()) for e in transcript.entries)
    return hashlib.sha256("\n".join(lines).encode("ascii")).hexdigest()


def attach_outcome(transcript: Transcript, state: SessionState) -> None:
    """Record the session's outcome plus the integrity digest."""
    transcript.outcome = {
        "final": state.outcome,
        "iterations": [
            {
                "index": rec.index,
                "params": P.params_to_dict(rec.params),
                "satisfactory": rec.verdict.satisfactory,
                "critique": rec.verdict.critique,
                "image_digest": rec.image_digest,
            }
            for rec in state.iterations
        ],
        "verdicts": [rec.verdict.satisfactory for rec in state.iterations],
        "transcript_digest": transcript_body_digest(transcript),
    }


def replay_session(transcript: Transcript, source: ImageBuffer,
                   event_sink=None) -> SessionState:
    """Run the recorded session against ``source``. Replay mismatches
    surface as a Failed session (cause preserved)."""
    backend = ReplayBackend(transcript)
    orch = Orchestrator(
        backend,
        max_iterations=int(transcript.meta.get("max_iterations", 5)),
        temperature=0.0,
        event_sink=event_sink,
    )
    state = orch.start(source)
    approach = transcript.meta.get("approach_index", 0)
    return orch.run_to_completion(state, auto_select=approach)


def verify_replay(path, source: ImageBuffer) -> list[str]:
    """Empty list when the recording replays without divergence."""
    problems: list[str] = []
    for line_no in noncanonical_lines(path):
        problems.append(f"line {line_no} is not in canonical transcript form")
    if problems:
        return problems

    try:
        transcript = load_transcript(path)
    except TranscriptFormatError as exc:
        return [str(exc)]

    if transcript.outcome is None:
        return ["transcript has no outcome record to verify against"]
    recorded_digest = transcript.outcome.get("transcript_digest")
    if recorded_digest != transcript_body_digest(transcript):
        problems.append("transcript digest mismatch: meta or exchange lines were modified")
    if transcript.meta.get("source_digest") != source.digest():
        problems.append("source image digest mismatch: wrong input image for this recording")
    if problems:
        return problems

    state = replay_session(transcript, source)
    if state.stage is not Stage.DONE:
        return [f"replay ended {state.stage.value}: {state.failure}"]

    recorded = transcript.outcome.get("iterations", [])
    if len(state.iterations) != len(recorded):
        problems.append(
            f"iteration count diverged: replay {len(state.iterations)}, recorded {len(recorded)}")
        return problems
    for rec, want in zip(state.iterations, recorded):
        tag = f"iteration {want.get('index')}"
        if rec.index != want.get("index"):
            problems.append(f"{tag}: index diverged ({rec.index})")
        if P.params_to_dict(rec.params) != want.get("params"):
            problems.append(f"{tag}: parameters diverged from the recording")
        if rec.verdict.satisfactory != want.get("satisfactory"):
            problems.append(f"{tag}: verdict flag diverged")
        if rec.verdict.critique != want.get("critique"):
            problems.append(f"{tag}: critique text diverged")
        if rec.image_digest != want.get("image_digest"):
            problems.append(f"{tag}: rendered image digest diverged")
    if state.outcome != transcript.outcome.get("final"):
        problems.append("final outcome label diverged")
    if [r.verdict.satisfactory for r in state.iterations] != transcript.outcome.get("verdicts"):
        problems.append("verdict sequence diverged")
    return problems
