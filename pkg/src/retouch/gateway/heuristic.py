"""Offline rule-table backend.

A pure function of (stage id, structured request inputs): no network, no
randomness, byte-identical output across runs. It lets the whole agent
loop, the service, and CI run with no model configured.

Parameter rules (applied as deltas to the previous iteration's absolute
values, clamped to legal ranges):
    underexposed        exposure +0.8
    overexposed         exposure -0.8
    highlight_clipping  highlights -30 (cumulative, floor -100)
    shadow_clipping     shadows +25, blacks +10
    low_contrast        contrast +20
    warm_bias           temp -500 from current
    cool_bias           temp +500 from current

Reflection is satisfactory once the rendered image's findings include
"balanced", or when the iteration counter reaches the cap minus one.
"""

from __future__ import annotations

from .. import params as P
from ..histogram import HistogramReport, ToneFinding, is_balanced, summarize_tone
from .base import BackendRequest, BackendResponse, GatewayError, canonical_json, validate_request

_DIRECTIVE_RULES = {
    "underexposed": ("exposure", "increase"),
    "overexposed": ("exposure", "decrease"),
    "highlight_clipping": ("highlights", "decrease"),
    "shadow_clipping": ("shadows", "increase"),
    "low_contrast": ("contrast", "increase"),
    "warm_bias": ("temp", "decrease"),
    "cool_bias": ("temp", "increase"),
}

_BRIGHTNESS_WORDS = ((96.0, "dark"), (176.0, "mid-toned"), (256.0, "bright"))


def _findings_from(structured: dict) -> tuple[ToneFinding, ...]:
    report = HistogramReport.from_dict(structured["histogram_report"])
    return summarize_tone(report)


def _brightness_word(structured: dict) -> str:
    report = HistogramReport.from_dict(structured["histogram_report"])
    mean = report.pooled_mean
    for limit, word in _BRIGHTNESS_WORDS:
        if mean < limit:
            return word
    return "bright"


def _cast_word(structured: dict) -> str:
    report = HistogramReport.from_dict(structured["histogram_report"])
    if report.warm_cool_bias > 0.06:
        return "warm"
    if report.warm_cool_bias < -0.06:
        return "cool"
    return "neutral"


def propose_parameters(previous: dict, findings: tuple[ToneFinding, ...]) -> dict:
    """Apply the rule table to the previous absolute parameter set."""
    doc = P.params_to_dict(P.params_from_dict(previous))
    kinds = {f.kind for f in findings}

    def clamp(value, low, high):
        return min(high, max(low, value))

    if "underexposed" in kinds:
        doc["exposure"] = clamp(doc["exposure"] + 0.8, -5.0, 5.0)
    if "overexposed" in kinds:
        doc["exposure"] = clamp(doc["exposure"] - 0.8, -5.0, 5.0)
    if "highlight_clipping" in kinds:
        doc["highlights"] = max(-100.0, doc["highlights"] - 30.0)
    if "shadow_clipping" in kinds:
        doc["shadows"] = clamp(doc["shadows"] + 25.0, -100.0, 100.0)
        doc["blacks"] = clamp(doc["blacks"] + 10.0, -100.0, 100.0)
    if "low_contrast" in kinds:
        doc["contrast"] = clamp(doc["contrast"] + 20.0, -100.0, 100.0)
    if "warm_bias" in kinds:
        doc["temp"] = clamp(doc["temp"] - 500.0, 2000.0, 50000.0)
    if "cool_bias" in kinds:
        doc["temp"] = clamp(doc["temp"] + 500.0, 2000.0, 50000.0)
    return doc


def reflection_verdict(findings: tuple[ToneFinding, ...], iteration: int, max_iterations: int) -> dict:
    issues = [f for f in findings if f.kind in _DIRECTIVE_RULES]
    if is_balanced(findings) or iteration >= max_iterations - 1:
        reason = ("the tonal findings are balanced" if is_balanced(findings)
                  else "the iteration budget is nearly exhausted")
        return {
            "satisfactory": True,
            "critique": f"The adjustment is satisfactory: {reason}.",
            "directives": [],
        }
    names = ", ".join(f.kind.replace("_", " ") for f in issues)
    return {
        "satisfactory": False,
        "critique": f"The adjustment is not satisfactory: the rendered image still shows {names}.",
        "directives": [
            {"path": _DIRECTIVE_RULES[f.kind][0], "direction": _DIRECTIVE_RULES[f.kind][1]}
            for f in issues
        ],
    }


def _describe_findings(findings: tuple[ToneFinding, ...]) -> str:
    parts = []
    for f in findings:
        if f.kind == "balanced":
            parts.append("overall balance is good")
        else:
            parts.append(f"{f.kind.replace('_', ' ')} (value {f.value:.4g}, threshold {f.threshold:.4g})")
    return "; ".join(parts)


class HeuristicBackend:
    """Deterministic stand-in for a vision-language model."""

    name = "heuristic"
    deterministic = True

    def complete(self, request: BackendRequest) -> BackendResponse:
        validate_request(request)
        handler = getattr(self, f"_stage_{request.stage}", None)
        if handler is None:
            raise GatewayError(f"heuristic backend does not know stage {request.stage!r}")
        payload = handler(request.structured)
        return BackendResponse(text=canonical_json(payload), payload=payload)

    def _stage_content_description(self, structured: dict) -> dict:
        word = _brightness_word(structured)
        cast = _cast_word(structured)
        return {
            "description": (
                f"A {word} photograph with a {cast} color cast. "
                "Assessment is based on channel statistics; no semantic "
                "content recognition is available offline."
            )
        }

    def _stage_strategy_proposal(self, structured: dict) -> dict:
        findings = _findings_from(structured)
        issues = _describe_findings(findings)
        return {
            "approaches": [
                {
                    "name": "Measured correction",
                    "light": "Fix only the measured tonal issues: " + issues + ".",
                    "color": "Neutralize any measured cast; keep saturation untouched.",
                    "mixer_notes": "No per-channel changes.",
                },
                {
                    "name": "Gentle lift",
                    "light": "Apply the measured fixes plus a slight shadow lift for openness.",
                    "color": "Lean slightly warm after neutralizing the cast.",
                    "mixer_notes": "No per-channel changes.",
                },
                {
                    "name": "Contrast forward",
                    "light": "Apply the measured fixes and favor stronger midtone contrast.",
                    "color": "Keep white balance neutral.",
                    "mixer_notes": "No per-channel changes.",
                },
            ]
        }

    def _stage_final_plan(self, structured: dict) -> dict:
        approach = structured.get("approach") or {}
        name = approach.get("name", "Measured correction")
        instruction = structured.get("instruction") or ""
        extra = f" User direction: {instruction}" if instruction else ""
        return {"plan": f"Follow the '{name}' approach, correcting measured tonal issues in order of severity.{extra}"}

    def _stage_tone_analysis(self, structured: dict) -> dict:
        findings = _findings_from(structured)
        return {"analysis": "Histogram findings: " + _describe_findings(findings) + "."}

    def _stage_param_generation(self, structured: dict) -> dict:
        findings = _findings_from(structured)
        previous = structured.get("previous_params") or P.params_to_dict(P.identity_params())
        doc = propose_parameters(previous, findings)
        applied = [f.kind.replace("_", " ") for f in findings if f.kind in _DIRECTIVE_RULES]
        rationale = ("Adjusting for: " + ", ".join(applied)) if applied else "No measured issues; holding previous values."
        return {"params": doc, "rationale": rationale}

    def _stage_reflection(self, structured: dict) -> dict:
        findings = _findings_from(structured)
        return reflection_verdict(
            findings,
            int(structured.get("iteration", 1)),
            int(structured.get("max_iterations", 5)),
        )

    def _stage_summary(self, structured: dict) -> dict:
        iterations = structured.get("iterations", [])
        n = len(iterations)
        closing = "the final pass was judged satisfactory" if (
            iterations and iterations[-1].get("satisfactory")
        ) else "the iteration budget was reached"
        return {"summary": f"Completed {n} retouching iteration{'s' if n != 1 else ''}; {closing}."}

    def _stage_style_parse(self, structured: dict) -> dict:
        word = _brightness_word(structured)
        cast = _cast_word(structured)
        report = HistogramReport.from_dict(structured["histogram_report"])
        findings = summarize_tone(report)
        kinds = {f.kind for f in findings}
        contrast = "high contrast" if "high_contrast" in kinds else (
            "low contrast" if "low_contrast" in kinds else "moderate contrast")
        return {
            "palette": f"{cast} palette dominated by the {report.dominant_channel} channel",
            "tonal_character": f"{word}, {contrast}",
            "mood": "moody" if word == "dark" else ("airy" if word == "bright" else "even-keeled"),
            "notable_treatments": "none detected from channel statistics",
        }
