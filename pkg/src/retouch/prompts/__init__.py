"""Versioned prompt text assets, one per agent stage."""

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load_prompt(name: str) -> str:
    ref = resources.files("retouch.prompts").joinpath(f"{name}.txt")
    return ref.read_text(encoding="utf-8")
