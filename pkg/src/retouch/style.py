"""Style parser: turns reference material (a style image, or a prior
image plus the parameters that produced it) into textual directives the
planning stage can consume."""

from __future__ import annotations

from dataclasses import dataclass

from . import params as P
from .gateway import BackendRequest, attach_image, canonical_json
from .histogram import compute_histogram, summarize_tone
from .image import ImageBuffer
from .prompts import load_prompt

MAX_DIRECTIVE_LENGTH = 2000


@dataclass(frozen=True)
class StyleDirective:
    source_kind: str  # text | reference_image | reference_params
    text: str
    params: P.RetouchParams | None = None

    def __post_init__(self):
        if self.source_kind == "reference_params" and self.params is None:
            raise ValueError("reference_params directives carry the reference parameters")
        if not self.text or len(self.text) > MAX_DIRECTIVE_LENGTH:
            raise ValueError(f"directive text must be 1..{MAX_DIRECTIVE_LENGTH} characters")


def directive_from_text(text: str) -> StyleDirective:
    return StyleDirective(source_kind="text", text=text.strip()[:MAX_DIRECTIVE_LENGTH])


def parse_reference_image(backend, img: ImageBuffer, *, temperature: float = 0.0) -> StyleDirective:
    """One backend call (stage ``style_parse``) describing the reference
    image's palette, tonal character, mood, and notable treatments."""
    report = compute_histogram(img)
    request = BackendRequest(
        stage="style_parse",
        system_prompt=load_prompt("system"),
        user_prompt=load_prompt("style_parse").format(
            findings_json=canonical_json({
                "pooled_mean": report.pooled_mean,
                "dominant_channel": report.dominant_channel,
                "warm_cool_bias": report.warm_cool_bias,
            })),
        images=(attach_image(img, "reference"),),
        schema_id="style_parse",
        temperature=temperature,
        structured={"histogram_report": report.to_dict()},
    )
    payload = backend.complete(request).payload
    text = (
        f"Match this reference style: palette {payload['palette']}; "
        f"tonal character {payload['tonal_character']}; mood {payload['mood']}; "
        f"notable treatments: {payload['notable_treatments']}."
    )
    return StyleDirective(source_kind="reference_image", text=text[:MAX_DIRECTIVE_LENGTH])


def _format_value(value: float) -> str:
    text = f"{value:+g}"
    return text


def compact_param_table(params: P.RetouchParams) -> str:
    """Non-identity fields only, as `name value` pairs."""
    delta = P.diff(P.identity_params(), params)
    if not delta.changes:
        return "all values at identity"
    parts = []
    for change in delta.changes:
        if change.path == "temp":
            parts.append(f"temp {change.new:g}K")
        else:
            parts.append(f"{change.path} {_format_value(change.new)}")
    return ", ".join(parts)


def parse_reference_case(img: ImageBuffer, params: P.RetouchParams) -> StyleDirective:
    """Deterministic directive from a prior image + parameter pair: the
    compact parameter table plus the image's tone findings."""
    result = P.validate(params)
    if not result.ok:
        raise P.ParamValidationError(result.violations)
    findings = summarize_tone(compute_histogram(img))
    finding_text = ", ".join(f.kind.replace("_", " ") for f in findings)
    table = compact_param_table(params)
    if table == "all values at identity":
        text = (
            "Reference case: the reference image was left as shot (no-op baseline, "
            f"all parameters at identity). Its tone findings: {finding_text}."
        )
    else:
        text = (
            f"Reference case: a similar image was retouched with {table}. "
            f"The reference image's tone findings: {finding_text}."
        )
    return StyleDirective(source_kind="reference_params", text=text[:MAX_DIRECTIVE_LENGTH],
                          params=params)
