"""Bundled demo sessions: deterministic source images plus recorded
transcripts that replay complete retouching sessions offline.

Regenerate with tools/make_fixtures.py after engine or prompt changes
(request digests bind transcripts to rendered pixel content).
"""

from __future__ import annotations

from importlib import resources

DEMO_SESSIONS = (
    "coastal_cliffs",
    "dusk_tree",
    "leafy_shallows",
    "pastel_house",
    "desert_spire",
)

# satisfactory-flag sequence each demo transcript replays to
DEMO_VERDICTS: dict[str, tuple[bool, ...]] = {
    "coastal_cliffs": (False, True),
    "dusk_tree": (False, False, True),
    "leafy_shallows": (False, True),
    "pastel_house": (False, True),
    "desert_spire": (False, False, True),
}


def _path(relative: str):
    return resources.files("retouch.fixtures").joinpath(relative)


def demo_image_bytes(name: str) -> bytes:
    return _path(f"images/{name}.png").read_bytes()


def demo_transcript_text(name: str) -> str:
    return _path(f"transcripts/{name}.jsonl").read_text()


def demo_param_text(name: str, iteration: int) -> str:
    return _path(f"params/{name}_iter{iteration}.json").read_text()


def demo_image_path(name: str) -> str:
    return str(_path(f"images/{name}.png"))


def demo_transcript_path(name: str) -> str:
    return str(_path(f"transcripts/{name}.jsonl"))


def iteration_count(name: str) -> int:
    return len(DEMO_VERDICTS[name])
