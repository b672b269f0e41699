"""Retouching parameter set: validation, canonical JSON, and diffing.

The parameter set is the unit of exchange between the agent, the render
engine, the service, and the UI. Values are absolute per iteration, not
deltas; diffs exist only for display and logging.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

MIXER_CHANNELS = ("red", "orange", "yellow", "green", "cyan", "blue", "purple", "magenta")

BASIC_FIELDS = (
    "exposure", "contrast", "highlights", "shadows", "whites",
    "blacks", "temp", "tint", "vibrance", "saturation",
)

# Legal ranges. The slider bounds are a project decision mirroring the
# conventional develop-module ranges; they are not external ground truth.
EXPOSURE_RANGE = (-5.0, 5.0)
TEMP_RANGE = (2000.0, 50000.0)
TINT_RANGE = (-150.0, 150.0)
SLIDER_RANGE = (-100.0, 100.0)

NEUTRAL_TEMP = 6500.0


class ParamJsonError(ValueError):
    """Structurally invalid parameter JSON (bad syntax or unknown keys)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ParamValidationError(ValueError):
    """Parameter values violate their declared ranges."""

    def __init__(self, violations: tuple[Violation, ...]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


@dataclass(frozen=True)
class Violation:
    path: str
    value: float
    low: float
    high: float

    @property
    def message(self) -> str:
        return f"{self.path}={self.value!r} outside [{self.low}, {self.high}]"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class BasicAdjustments:
    """Global light and color sliders. ``exposure`` is in EV stops,
    ``temp`` in Kelvin; everything else is a [-100, 100] slider except
    ``tint`` which spans [-150, 150] (positive = magenta bias)."""

    exposure: float = 0.0
    contrast: float = 0.0
    highlights: float = 0.0
    shadows: float = 0.0
    whites: float = 0.0
    blacks: float = 0.0
    temp: float = NEUTRAL_TEMP
    tint: float = 0.0
    vibrance: float = 0.0
    saturation: float = 0.0


@dataclass(frozen=True)
class HslChannelAdjustment:
    hue: float = 0.0
    saturation: float = 0.0
    luminance: float = 0.0


@dataclass(frozen=True)
class HslMixer:
    """Per-hue-band adjustments over the eight fixed color channels."""

    red: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    orange: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    yellow: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    green: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    cyan: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    blue: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    purple: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)
    magenta: HslChannelAdjustment = field(default_factory=HslChannelAdjustment)

    def channel(self, name: str) -> HslChannelAdjustment:
        return getattr(self, name)


@dataclass(frozen=True)
class RetouchParams:
    basic: BasicAdjustments = field(default_factory=BasicAdjustments)
    mixer: HslMixer = field(default_factory=HslMixer)


@dataclass(frozen=True)
class FieldChange:
    path: str
    old: float
    new: float


@dataclass(frozen=True)
class ParamDiff:
    changes: tuple[FieldChange, ...] = ()

    def __len__(self) -> int:
        return len(self.changes)

    def paths(self) -> tuple[str, ...]:
        return tuple(c.path for c in self.changes)


def identity_params() -> RetouchParams:
    """All sliders 0, exposure 0.0, temp 6500, tint 0."""
    return RetouchParams()


def validate(params: RetouchParams) -> ValidationResult:
    """Range-check every field. Violations are data, not exceptions."""
    violations: list[Violation] = []

    def check(path: str, value: float, low: float, high: float) -> None:
        # NaN fails both comparisons; infinities fail one of them.
        if not (low <= value <= high):
            violations.append(Violation(path, value, low, high))

    b = params.basic
    check("exposure", b.exposure, *EXPOSURE_RANGE)
    check("temp", b.temp, *TEMP_RANGE)
    check("tint", b.tint, *TINT_RANGE)
    for name in ("contrast", "highlights", "shadows", "whites", "blacks", "vibrance", "saturation"):
        check(name, getattr(b, name), *SLIDER_RANGE)
    for channel in MIXER_CHANNELS:
        adj = params.mixer.channel(channel)
        for comp in ("hue", "saturation", "luminance"):
            check(f"mixer.{channel}.{comp}", getattr(adj, comp), *SLIDER_RANGE)
    return ValidationResult(tuple(violations))


def params_to_dict(params: RetouchParams) -> dict:
    """Plain nested dict in canonical field order."""
    out: dict = {name: getattr(params.basic, name) for name in BASIC_FIELDS}
    out["mixer"] = {
        channel: {
            "hue": params.mixer.channel(channel).hue,
            "saturation": params.mixer.channel(channel).saturation,
            "luminance": params.mixer.channel(channel).luminance,
        }
        for channel in MIXER_CHANNELS
    }
    return out


def _num(value: float) -> int | float:
    # Integral values serialize without a trailing ".0" so the canonical
    # text matches hand-written parameter files byte for byte.
    f = float(value)
    return int(f) if f.is_integer() else f


def to_json(params: RetouchParams) -> str:
    """Canonical JSON text: fixed key order, integral values as ints."""
    raw = params_to_dict(params)
    doc: dict = {name: _num(raw[name]) for name in BASIC_FIELDS}
    doc["mixer"] = {
        channel: {comp: _num(raw["mixer"][channel][comp]) for comp in ("hue", "saturation", "luminance")}
        for channel in MIXER_CHANNELS
    }
    return json.dumps(doc, separators=(",", ": "), indent=2)


@dataclass(frozen=True)
class ParsedParams:
    params: RetouchParams
    defaulted: tuple[str, ...]


def _require_number(path: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamJsonError(f"field {path!r} must be a number, got {type(value).__name__}")
    return float(value)


def parse_params(text: str) -> ParsedParams:
    """Strict parse of the canonical parameter format.

    Unknown keys are rejected by name. Missing keys default to identity
    values and are reported in ``defaulted`` (highest missing node wins:
    a fully absent mixer reports as ``mixer``, not 24 leaf paths).
    Range violations raise ParamValidationError.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParamJsonError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParamJsonError("parameter document must be a JSON object")

    defaulted: list[str] = []
    for key in doc:
        if key not in BASIC_FIELDS and key != "mixer":
            raise ParamJsonError(f"unknown key {key!r}")

    basic_kwargs = {}
    identity_basic = BasicAdjustments()
    for name in BASIC_FIELDS:
        if name in doc:
            basic_kwargs[name] = _require_number(name, doc[name])
        else:
            basic_kwargs[name] = getattr(identity_basic, name)
            defaulted.append(name)

    mixer_kwargs = {}
    if "mixer" not in doc:
        defaulted.append("mixer")
        mixer = HslMixer()
    else:
        mixer_doc = doc["mixer"]
        if not isinstance(mixer_doc, dict):
            raise ParamJsonError("'mixer' must be a JSON object")
        for key in mixer_doc:
            if key not in MIXER_CHANNELS:
                raise ParamJsonError(f"unknown mixer channel {key!r}")
        for channel in MIXER_CHANNELS:
            if channel not in mixer_doc:
                defaulted.append(f"mixer.{channel}")
                mixer_kwargs[channel] = HslChannelAdjustment()
                continue
            chan_doc = mixer_doc[channel]
            if not isinstance(chan_doc, dict):
                raise ParamJsonError(f"mixer channel {channel!r} must be a JSON object")
            for key in chan_doc:
                if key not in ("hue", "saturation", "luminance"):
                    raise ParamJsonError(f"unknown key {key!r} in mixer channel {channel!r}")
            comps = {}
            for comp in ("hue", "saturation", "luminance"):
                if comp in chan_doc:
                    comps[comp] = _require_number(f"mixer.{channel}.{comp}", chan_doc[comp])
                else:
                    comps[comp] = 0.0
                    defaulted.append(f"mixer.{channel}.{comp}")
            mixer_kwargs[channel] = HslChannelAdjustment(**comps)
        mixer = HslMixer(**mixer_kwargs)

    params = RetouchParams(basic=BasicAdjustments(**basic_kwargs), mixer=mixer)
    result = validate(params)
    if not result.ok:
        raise ParamValidationError(result.violations)
    return ParsedParams(params=params, defaulted=tuple(defaulted))


def from_json(text: str) -> RetouchParams:
    return parse_params(text).params


def _field_paths() -> tuple[str, ...]:
    paths = list(BASIC_FIELDS)
    for channel in MIXER_CHANNELS:
        for comp in ("hue", "saturation", "luminance"):
            paths.append(f"mixer.{channel}.{comp}")
    return tuple(paths)


FIELD_PATHS = _field_paths()


def _get(params: RetouchParams, path: str) -> float:
    parts = path.split(".")
    if len(parts) == 1:
        return getattr(params.basic, parts[0])
    return getattr(params.mixer.channel(parts[1]), parts[2])


def diff(old: RetouchParams, new: RetouchParams) -> ParamDiff:
    """Exact change set between two parameter sets, in canonical order."""
    changes = [
        FieldChange(path, _get(old, path), _get(new, path))
        for path in FIELD_PATHS
        if _get(old, path) != _get(new, path)
    ]
    return ParamDiff(tuple(changes))


def apply_diff(old: RetouchParams, delta: ParamDiff) -> RetouchParams:
    basic = old.basic
    mixer = old.mixer
    for change in delta.changes:
        parts = change.path.split(".")
        if len(parts) == 1:
            basic = replace(basic, **{parts[0]: change.new})
        else:
            channel = replace(mixer.channel(parts[1]), **{parts[2]: change.new})
            mixer = replace(mixer, **{parts[1]: channel})
    return RetouchParams(basic=basic, mixer=mixer)


def params_from_dict(doc: dict) -> RetouchParams:
    """Parse from an already-decoded JSON object (same strictness as text)."""
    return from_json(json.dumps(doc))
