"""Regenerates the bundled demo-session fixtures.

Builds each session's deterministic source image, runs a full agent
session against the authored script, and records the transcript with an
outcome block. Also emits one canonical parameter JSON file per
iteration and a captured event log for the web console's tests.

Run from the repository root:

    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from session_scripts import ALL_SESSIONS, SessionScript  # noqa: E402

from retouch import params as P  # noqa: E402
from retouch.agent import Orchestrator, Stage  # noqa: E402
from retouch.gateway import RecordingBackend, ScriptedBackend, Transcript  # noqa: E402
from retouch.gateway import schemas  # noqa: E402
from retouch.image import ImageBuffer, png_bytes  # noqa: E402
from retouch.replay import attach_outcome  # noqa: E402

FIXTURE_ROOT = pathlib.Path(__file__).resolve().parent.parent / "src" / "retouch" / "fixtures"
FRONTEND_FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

IMAGE_WIDTH = 96
IMAGE_HEIGHT = 64


def build_source_image(seed: int, top: tuple, bottom: tuple, noise: int) -> ImageBuffer:
    """Vertical color gradient with seeded grain: small, distinct, and
    bit-reproducible."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, IMAGE_HEIGHT)[:, None, None]
    top_arr = np.asarray(top, dtype=np.float64)[None, None, :]
    bottom_arr = np.asarray(bottom, dtype=np.float64)[None, None, :]
    base = top_arr * (1.0 - t) + bottom_arr * t
    grain = rng.normal(0.0, noise, size=(IMAGE_HEIGHT, IMAGE_WIDTH, 3))
    pixels = np.clip(base + grain, 0, 255).astype(np.uint8)
    return ImageBuffer(pixels=pixels)


def scripted_responses(script: SessionScript) -> dict[str, list[dict]]:
    responses = {
        "content_description": [{"description": script.description}],
        "strategy_proposal": [{"approaches": script.approaches}],
        "final_plan": [{"plan": script.plan}],
        "tone_analysis": [{"analysis": it.tone_analysis} for it in script.iterations],
        "param_generation": [
            {"params": it.params, "rationale": it.rationale} for it in script.iterations
        ],
        "reflection": [
            {"satisfactory": it.satisfactory, "critique": it.critique,
             "directives": it.directives}
            for it in script.iterations
        ],
        "summary": [{"summary": script.summary}],
    }
    for stage, payloads in responses.items():
        for payload in payloads:
            errors = schemas.validation_errors(stage, payload)
            if errors:
                raise SystemExit(f"{script.name}: invalid scripted payload for {stage}: {errors}")
    return responses


def generate(script: SessionScript) -> None:
    source = build_source_image(**script.image_recipe)
    transcript = Transcript(meta={
        "name": script.name,
        "source_digest": source.digest(),
        "image_size": f"{source.width}x{source.height}",
        "max_iterations": 5,
        "approach_index": 0,
        "fixture_version": 1,
    })
    backend = RecordingBackend(ScriptedBackend(scripted_responses(script)), transcript)
    orch = Orchestrator(backend, max_iterations=5)
    state = orch.run_to_completion(orch.start(source), auto_select=0)

    if state.stage is not Stage.DONE:
        raise SystemExit(f"{script.name}: session ended {state.stage} ({state.failure})")
    expected = [it.satisfactory for it in script.iterations]
    actual = [rec.verdict.satisfactory for rec in state.iterations]
    if actual != expected:
        raise SystemExit(f"{script.name}: verdicts {actual} != scripted {expected}")

    attach_outcome(transcript, state)

    (FIXTURE_ROOT / "images").mkdir(parents=True, exist_ok=True)
    (FIXTURE_ROOT / "transcripts").mkdir(parents=True, exist_ok=True)
    (FIXTURE_ROOT / "params").mkdir(parents=True, exist_ok=True)

    (FIXTURE_ROOT / "images" / f"{script.name}.png").write_bytes(png_bytes(source))
    transcript.save(FIXTURE_ROOT / "transcripts" / f"{script.name}.jsonl")
    for rec in state.iterations:
        path = FIXTURE_ROOT / "params" / f"{script.name}_iter{rec.index}.json"
        path.write_text(P.to_json(rec.params) + "\n")

    print(f"{script.name}: {len(state.iterations)} iterations, outcome {state.outcome}")


def capture_console_events() -> None:
    """Event log of the first demo session for the web console tests."""
    from retouch.gateway import ReplayBackend, load_transcript

    script = ALL_SESSIONS[0]
    source = build_source_image(**script.image_recipe)
    transcript = load_transcript(FIXTURE_ROOT / "transcripts" / f"{script.name}.jsonl")
    orch = Orchestrator(ReplayBackend(transcript), max_iterations=5)
    state = orch.run_to_completion(orch.start(source), auto_select=0)
    if state.stage is not Stage.DONE:
        raise SystemExit(f"console capture failed: {state.stage}")
    FRONTEND_FIXTURES.mkdir(parents=True, exist_ok=True)
    out = FRONTEND_FIXTURES / f"{script.name}_events.json"
    out.write_text(json.dumps(state.events, indent=2, sort_keys=True) + "\n")
    print(f"console events: {out.relative_to(FRONTEND_FIXTURES.parent.parent.parent)}")


def main() -> None:
    for script in ALL_SESSIONS:
        generate(script)
    capture_console_events()


if __name__ == "__main__":
    main()
