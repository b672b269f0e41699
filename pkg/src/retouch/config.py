"""Runtime configuration shared by the service and the CLI."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

DEFAULT_PORT = 8484


@dataclass
class AppConfig:
    backend: str = "heuristic"  # heuristic | openai_compatible | replay
    base_url: str = ""
    api_key: str = ""
    model: str = ""
    temperature: float = 0.7
    max_iterations: int = 5
    store_root: str = "sessions"
    port: int = DEFAULT_PORT
    transcript_path: str | None = None  # required for the replay backend

    ENV_PREFIX = "RETOUCH_"

    @classmethod
    def from_env(cls, env=None) -> "AppConfig":
        env = os.environ if env is None else env
        kwargs = {}
        casts = {f.name: f.type for f in fields(cls)}
        for name in casts:
            key = cls.ENV_PREFIX + name.upper()
            if key not in env:
                continue
            raw = env[key]
            if name in ("temperature",):
                kwargs[name] = float(raw)
            elif name in ("max_iterations", "port"):
                kwargs[name] = int(raw)
            else:
                kwargs[name] = raw
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "AppConfig":
        with open(path) as fh:
            doc = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def override(self, **kwargs) -> "AppConfig":
        clean = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **clean)

    def make_backend(self):
        """Fresh backend instance (replay backends hold a cursor and must
        not be shared across sessions)."""
        from .gateway import HeuristicBackend, OpenAICompatBackend, ReplayBackend, load_transcript

        if self.backend == "heuristic":
            return HeuristicBackend()
        if self.backend == "openai_compatible":
            if not self.base_url or not self.model:
                raise ValueError("openai_compatible backend needs base_url and model")
            return OpenAICompatBackend(self.base_url, self.api_key, self.model)
        if self.backend == "replay":
            if not self.transcript_path:
                raise ValueError("replay backend needs transcript_path")
            return ReplayBackend(load_transcript(self.transcript_path))
        raise ValueError(f"unknown backend {self.backend!r}")
