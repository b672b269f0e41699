"""File-backed session persistence.

Per-session folder layout under the store root:
    source.png       the uploaded image
    iter_NNN.png     one render per iteration
    session.json     state snapshot, rewritten atomically at each stage
                     transition (so a crash rolls back to stage entry)
    events.jsonl     append-only session log, the event stream's source
    transcript.jsonl backend exchanges when recording is enabled
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .agent import Orchestrator, SessionState
from .image import ImageBuffer, load_image, png_bytes


class SnapshotCorruptError(Exception):
    pass


class SessionStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def list_sessions(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir()
            if p.is_dir() and (p / "session.json").exists()
        )

    def exists(self, session_id: str) -> bool:
        return (self.session_dir(session_id) / "session.json").exists()

    # -- writing --------------------------------------------------------

    def create(self, state: SessionState) -> None:
        folder = self.session_dir(state.session_id)
        folder.mkdir(parents=True, exist_ok=False)
        (folder / "source.png").write_bytes(png_bytes(state.source))
        self.persist(state)

    def persist(self, state: SessionState) -> None:
        """Atomic snapshot plus any iteration images not yet on disk."""
        folder = self.session_dir(state.session_id)
        for record in state.iterations:
            if record.image is None:
                continue
            path = folder / f"iter_{record.index:03d}.png"
            if not path.exists():
                path.write_bytes(png_bytes(record.image))
        snapshot = json.dumps(state.to_dict(), sort_keys=True)
        tmp = folder / "session.json.tmp"
        tmp.write_text(snapshot)
        os.replace(tmp, folder / "session.json")

    def append_event(self, state: SessionState, event: dict) -> None:
        folder = self.session_dir(state.session_id)
        with open(folder / "events.jsonl", "a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    # -- reading --------------------------------------------------------

    def read_events(self, session_id: str, after_seq: int = 0) -> list[dict]:
        path = self.session_dir(session_id) / "events.jsonl"
        if not path.exists():
            return []
        events = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event.get("seq", 0) > after_seq:
                    events.append(event)
        return events

    def iteration_image_path(self, session_id: str, index: int) -> Path:
        return self.session_dir(session_id) / f"iter_{index:03d}.png"

    def restore(self, session_id: str) -> SessionState:
        """Rebuild the state from disk; events are reloaded from the log
        and the in-flight stage is implicitly rolled back to its entry
        point (snapshots are only written at transitions)."""
        folder = self.session_dir(session_id)
        snapshot_path = folder / "session.json"
        try:
            doc = json.loads(snapshot_path.read_text())
        except FileNotFoundError:
            raise SnapshotCorruptError(f"session {session_id} has no snapshot")
        except (json.JSONDecodeError, OSError) as exc:
            raise SnapshotCorruptError(f"session {session_id} snapshot unreadable: {exc}") from exc

        try:
            source = load_image(folder / "source.png")
            images: dict[str, ImageBuffer] = {}
            for record in doc.get("iterations", []):
                path = folder / f"iter_{int(record['index']):03d}.png"
                if path.exists():
                    images[record["image_digest"]] = load_image(path)
            state = SessionState.from_dict(doc, source=source, iteration_images=images)
        except (KeyError, TypeError, ValueError, OSError) as exc:
            raise SnapshotCorruptError(f"session {session_id} snapshot invalid: {exc}") from exc
        state.events = self.read_events(session_id)
        Orchestrator.rehydrate(state)
        return state
