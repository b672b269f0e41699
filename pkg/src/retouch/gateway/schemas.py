"""Registry of structured-output schemas, one per agent stage."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

_NONEMPTY_TEXT = {"type": "string", "minLength": 1}


def _load_params_schema() -> dict:
    ref = resources.files("retouch").joinpath("schemas/retouch_params.schema.json")
    return json.loads(ref.read_text())


PARAMS_SCHEMA = _load_params_schema()

_APPROACH = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "light", "color", "mixer_notes"],
    "properties": {
        "name": _NONEMPTY_TEXT,
        "light": _NONEMPTY_TEXT,
        "color": _NONEMPTY_TEXT,
        "mixer_notes": _NONEMPTY_TEXT,
    },
}

_DIRECTIVE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["path", "direction"],
    "properties": {
        "path": _NONEMPTY_TEXT,
        "direction": {"enum": ["increase", "decrease"]},
    },
}

SCHEMAS: dict[str, dict] = {
    "content_description": {
        "type": "object",
        "additionalProperties": False,
        "required": ["description"],
        "properties": {"description": _NONEMPTY_TEXT},
    },
    "strategy_proposal": {
        "type": "object",
        "additionalProperties": False,
        "required": ["approaches"],
        "properties": {
            "approaches": {"type": "array", "minItems": 3, "maxItems": 3, "items": _APPROACH},
        },
    },
    "final_plan": {
        "type": "object",
        "additionalProperties": False,
        "required": ["plan"],
        "properties": {"plan": _NONEMPTY_TEXT},
    },
    "tone_analysis": {
        "type": "object",
        "additionalProperties": False,
        "required": ["analysis"],
        "properties": {"analysis": _NONEMPTY_TEXT},
    },
    "param_generation": {
        "type": "object",
        "additionalProperties": False,
        "required": ["params", "rationale"],
        "properties": {"params": PARAMS_SCHEMA, "rationale": _NONEMPTY_TEXT},
    },
    "reflection": {
        "type": "object",
        "additionalProperties": False,
        "required": ["satisfactory", "critique"],
        "properties": {
            "satisfactory": {"type": "boolean"},
            "critique": _NONEMPTY_TEXT,
            "directives": {"type": "array", "items": _DIRECTIVE},
        },
    },
    "summary": {
        "type": "object",
        "additionalProperties": False,
        "required": ["summary"],
        "properties": {"summary": _NONEMPTY_TEXT},
    },
    "style_parse": {
        "type": "object",
        "additionalProperties": False,
        "required": ["palette", "tonal_character", "mood", "notable_treatments"],
        "properties": {
            "palette": _NONEMPTY_TEXT,
            "tonal_character": _NONEMPTY_TEXT,
            "mood": _NONEMPTY_TEXT,
            "notable_treatments": _NONEMPTY_TEXT,
        },
    },
}


def is_registered(schema_id: str) -> bool:
    return schema_id in SCHEMAS


def get_schema(schema_id: str) -> dict:
    return SCHEMAS[schema_id]


@lru_cache(maxsize=None)
def _validator(schema_id: str) -> jsonschema.Draft7Validator:
    return jsonschema.Draft7Validator(SCHEMAS[schema_id])


def validation_errors(schema_id: str, payload) -> list[str]:
    """Empty list when the payload satisfies the schema."""
    return [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(_validator(schema_id).iter_errors(payload), key=str)
    ]
