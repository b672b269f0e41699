"""Agent orchestrator: an explicit state machine over the stages

    content description -> strategy proposal -> await user direction ->
    final plan -> (tone analysis -> parameter generation -> render ->
    reflection)* -> summary -> done

Every stage except render is one backend exchange; render invokes the
engine. Each executed stage appends explanatory text to the session log,
and the reflection loop is bounded by ``max_iterations``. The first
reflection always runs, even when the tone findings are already clean.
"""

from __future__ import annotations

import enum
import json
import time
import uuid
from dataclasses import dataclass, field

from . import engine
from . import params as P
from .gateway import (
    AttachedImage,
    BackendRequest,
    GatewayError,
    attach_image,
    canonical_json,
)
from .histogram import HistogramReport, compute_histogram, render_histogram_image
from .image import ImageBuffer
from .prompts import load_prompt


class SessionError(Exception):
    pass


class WrongStageError(SessionError):
    pass


class Stage(str, enum.Enum):
    CONTENT_DESCRIPTION = "content_description"
    STRATEGY_PROPOSAL = "strategy_proposal"
    AWAIT_USER_DIRECTION = "await_user_direction"
    FINAL_PLAN = "final_plan"
    TONE_ANALYSIS = "tone_analysis"
    PARAM_GENERATION = "param_generation"
    RENDER = "render"
    REFLECTION = "reflection"
    SUMMARY = "summary"
    DONE = "done"
    FAILED = "failed"


# Allowed transitions; advancing anywhere else is a bug, not a backend error.
STAGE_GRAPH: dict[Stage, tuple[Stage, ...]] = {
    Stage.CONTENT_DESCRIPTION: (Stage.STRATEGY_PROPOSAL, Stage.FAILED),
    Stage.STRATEGY_PROPOSAL: (Stage.AWAIT_USER_DIRECTION, Stage.FAILED),
    Stage.AWAIT_USER_DIRECTION: (Stage.FINAL_PLAN, Stage.FAILED),
    Stage.FINAL_PLAN: (Stage.TONE_ANALYSIS, Stage.FAILED),
    Stage.TONE_ANALYSIS: (Stage.PARAM_GENERATION, Stage.FAILED),
    Stage.PARAM_GENERATION: (Stage.RENDER, Stage.FAILED),
    Stage.RENDER: (Stage.REFLECTION, Stage.FAILED),
    Stage.REFLECTION: (Stage.TONE_ANALYSIS, Stage.SUMMARY, Stage.FAILED),
    Stage.SUMMARY: (Stage.DONE, Stage.FAILED),
    Stage.DONE: (),
    Stage.FAILED: (),
}

TERMINAL_STAGES = (Stage.DONE, Stage.FAILED)

DEFAULT_MAX_ITERATIONS = 5
DEFAULT_LIVE_TEMPERATURE = 0.7


@dataclass(frozen=True)
class Approach:
    name: str
    light: str
    color: str
    mixer_notes: str

    def to_dict(self) -> dict:
        return {"name": self.name, "light": self.light,
                "color": self.color, "mixer_notes": self.mixer_notes}

    @classmethod
    def from_dict(cls, doc: dict) -> "Approach":
        return cls(name=doc["name"], light=doc["light"],
                   color=doc["color"], mixer_notes=doc["mixer_notes"])


@dataclass(frozen=True)
class Directive:
    path: str
    direction: str  # increase | decrease

    def to_dict(self) -> dict:
        return {"path": self.path, "direction": self.direction}


@dataclass(frozen=True)
class ReflectionVerdict:
    satisfactory: bool
    critique: str
    directives: tuple[Directive, ...] = ()

    def __post_init__(self):
        if self.satisfactory and self.directives:
            raise ValueError("a satisfactory verdict carries no directives")

    def to_dict(self) -> dict:
        return {
            "satisfactory": self.satisfactory,
            "critique": self.critique,
            "directives": [d.to_dict() for d in self.directives],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ReflectionVerdict":
        satisfactory = bool(payload["satisfactory"])
        directives = () if satisfactory else tuple(
            Directive(d["path"], d["direction"]) for d in payload.get("directives", [])
        )
        return cls(satisfactory=satisfactory, critique=payload["critique"],
                   directives=directives)


@dataclass
class IterationRecord:
    index: int  # 1-based
    params: P.RetouchParams
    image: ImageBuffer | None
    image_digest: str
    report: HistogramReport
    verdict: ReflectionVerdict
    tone_analysis: str
    rationale: str

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "params": P.params_to_dict(self.params),
            "image_digest": self.image_digest,
            "report": self.report.to_dict(),
            "verdict": self.verdict.to_dict(),
            "tone_analysis": self.tone_analysis,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, doc: dict, image: ImageBuffer | None = None) -> "IterationRecord":
        verdict_doc = doc["verdict"]
        return cls(
            index=int(doc["index"]),
            params=P.params_from_dict(doc["params"]),
            image=image,
            image_digest=doc["image_digest"],
            report=HistogramReport.from_dict(doc["report"]),
            verdict=ReflectionVerdict(
                satisfactory=bool(verdict_doc["satisfactory"]),
                critique=verdict_doc["critique"],
                directives=tuple(Directive(d["path"], d["direction"])
                                 for d in verdict_doc.get("directives", [])),
            ),
            tone_analysis=doc["tone_analysis"],
            rationale=doc["rationale"],
        )


@dataclass
class WorkingIteration:
    tone_analysis: str = ""
    params: P.RetouchParams | None = None
    rationale: str = ""
    image: ImageBuffer | None = None
    image_digest: str = ""
    report: HistogramReport | None = None

    def to_dict(self) -> dict:
        return {
            "tone_analysis": self.tone_analysis,
            "params": P.params_to_dict(self.params) if self.params is not None else None,
            "rationale": self.rationale,
            "image_digest": self.image_digest,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "WorkingIteration":
        params_doc = doc.get("params")
        return cls(
            tone_analysis=doc.get("tone_analysis", ""),
            params=P.params_from_dict(params_doc) if params_doc is not None else None,
            rationale=doc.get("rationale", ""),
            image_digest=doc.get("image_digest", ""),
        )


@dataclass
class SessionState:
    session_id: str
    created_at: float
    stage: Stage
    source: ImageBuffer | None
    source_digest: str
    source_report: HistogramReport
    max_iterations: int
    instruction: str | None = None
    style_directives: list[str] = field(default_factory=list)
    content_description: str | None = None
    strategies: list[Approach] = field(default_factory=list)
    chosen_approach: int | None = None
    direction_text: str | None = None
    plan: str | None = None
    current_iteration: int = 0  # 1-based while the loop is active
    working: WorkingIteration = field(default_factory=WorkingIteration)
    iterations: list[IterationRecord] = field(default_factory=list)
    outcome: str | None = None  # satisfied | cap_reached
    failure: str | None = None
    summary: str | None = None
    events: list[dict] = field(default_factory=list)
    event_seq: int = 0

    def current_image(self) -> ImageBuffer:
        if self.iterations and self.iterations[-1].image is not None:
            return self.iterations[-1].image
        return self.source

    def to_dict(self) -> dict:
        """Serializable snapshot; pixel data and events live elsewhere."""
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "stage": self.stage.value,
            "source_digest": self.source_digest,
            "source_report": self.source_report.to_dict(),
            "max_iterations": self.max_iterations,
            "instruction": self.instruction,
            "style_directives": list(self.style_directives),
            "content_description": self.content_description,
            "strategies": [a.to_dict() for a in self.strategies],
            "chosen_approach": self.chosen_approach,
            "direction_text": self.direction_text,
            "plan": self.plan,
            "current_iteration": self.current_iteration,
            "working": self.working.to_dict(),
            "iterations": [rec.to_dict() for rec in self.iterations],
            "outcome": self.outcome,
            "failure": self.failure,
            "summary": self.summary,
            "event_seq": self.event_seq,
        }

    @classmethod
    def from_dict(cls, doc: dict, *, source: ImageBuffer | None = None,
                  iteration_images: dict[str, ImageBuffer] | None = None) -> "SessionState":
        images = iteration_images or {}
        state = cls(
            session_id=doc["session_id"],
            created_at=float(doc["created_at"]),
            stage=Stage(doc["stage"]),
            source=source,
            source_digest=doc["source_digest"],
            source_report=HistogramReport.from_dict(doc["source_report"]),
            max_iterations=int(doc["max_iterations"]),
            instruction=doc.get("instruction"),
            style_directives=list(doc.get("style_directives", [])),
            content_description=doc.get("content_description"),
            strategies=[Approach.from_dict(a) for a in doc.get("strategies", [])],
            chosen_approach=doc.get("chosen_approach"),
            direction_text=doc.get("direction_text"),
            plan=doc.get("plan"),
            current_iteration=int(doc.get("current_iteration", 0)),
            working=WorkingIteration.from_dict(doc.get("working", {})),
            outcome=doc.get("outcome"),
            failure=doc.get("failure"),
            summary=doc.get("summary"),
            event_seq=int(doc.get("event_seq", 0)),
        )
        state.iterations = [
            IterationRecord.from_dict(rec, images.get(rec["image_digest"]))
            for rec in doc.get("iterations", [])
        ]
        return state


_attach = attach_image


class Orchestrator:
    """Drives sessions against one backend. Stateless across sessions;
    per-session calls must be serialized by the caller."""

    def __init__(self, backend, *, max_iterations: int = DEFAULT_MAX_ITERATIONS,
                 temperature: float | None = None, event_sink=None):
        if max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        self.backend = backend
        self.max_iterations = max_iterations
        if temperature is None:
            temperature = 0.0 if getattr(backend, "deterministic", False) else DEFAULT_LIVE_TEMPERATURE
        self.temperature = temperature
        self.event_sink = event_sink

    # -- events --------------------------------------------------------

    def _emit(self, state: SessionState, event_type: str, **data) -> None:
        state.event_seq += 1
        event = {"seq": state.event_seq, "type": event_type, **data}
        state.events.append(event)
        if self.event_sink is not None:
            self.event_sink(state, event)

    def _enter(self, state: SessionState, stage: Stage) -> None:
        if stage not in STAGE_GRAPH[state.stage]:
            raise SessionError(f"illegal transition {state.stage.value} -> {stage.value}")
        state.stage = stage
        self._emit(state, "stage_entered", stage=stage.value)

    def _say(self, state: SessionState, stage: Stage, text: str) -> None:
        self._emit(state, "text_emitted", stage=stage.value, text=text)

    # -- lifecycle ------------------------------------------------------

    def start(self, source: ImageBuffer, instruction: str | None = None,
              style_directives: list[str] | None = None) -> SessionState:
        """New session at the content-description stage, with the source
        histogram precomputed."""
        state = SessionState(
            session_id=uuid.uuid4().hex,
            created_at=time.time(),
            stage=Stage.CONTENT_DESCRIPTION,
            source=source,
            source_digest=source.digest(),
            source_report=compute_histogram(source),
            max_iterations=self.max_iterations,
            instruction=instruction,
            style_directives=list(style_directives or []),
        )
        self._emit(state, "stage_entered", stage=state.stage.value)
        return state

    def advance(self, state: SessionState) -> SessionState:
        """Execute exactly the current stage and transition."""
        if state.stage in TERMINAL_STAGES:
            raise WrongStageError(f"session is {state.stage.value}; nothing to advance")
        if state.stage is Stage.AWAIT_USER_DIRECTION:
            raise WrongStageError("session awaits user direction; call inject_instruction")
        handler = {
            Stage.CONTENT_DESCRIPTION: self._do_content_description,
            Stage.STRATEGY_PROPOSAL: self._do_strategy_proposal,
            Stage.FINAL_PLAN: self._do_final_plan,
            Stage.TONE_ANALYSIS: self._do_tone_analysis,
            Stage.PARAM_GENERATION: self._do_param_generation,
            Stage.RENDER: self._do_render,
            Stage.REFLECTION: self._do_reflection,
            Stage.SUMMARY: self._do_summary,
        }[state.stage]
        try:
            handler(state)
        except (GatewayError, P.ParamValidationError, P.ParamJsonError) as exc:
            self._fail(state, str(exc))
        return state

    def inject_instruction(self, state: SessionState, *, approach_index: int | None = None,
                           text: str | None = None) -> SessionState:
        if state.stage is not Stage.AWAIT_USER_DIRECTION:
            raise WrongStageError(
                f"direction only accepted while awaiting it, not at {state.stage.value}")
        if approach_index is None and text is None:
            raise SessionError("provide an approach index or free-form direction text")
        if approach_index is not None:
            if not (0 <= approach_index < len(state.strategies)):
                raise SessionError(f"approach index {approach_index} out of range")
            state.chosen_approach = approach_index
            chosen = state.strategies[approach_index]
            self._say(state, Stage.AWAIT_USER_DIRECTION,
                      f"Selected approach {approach_index + 1}: {chosen.name}.")
        if text is not None:
            state.direction_text = text
            self._say(state, Stage.AWAIT_USER_DIRECTION, f"User direction: {text}")
        self._enter(state, Stage.FINAL_PLAN)
        return state

    def run_to_completion(self, state: SessionState, auto_select: int | None = None) -> SessionState:
        """Advance until Done/Failed; at the direction gate pick
        ``auto_select`` (default: the first approach)."""
        while state.stage not in TERMINAL_STAGES:
            if state.stage is Stage.AWAIT_USER_DIRECTION:
                self.inject_instruction(
                    state, approach_index=auto_select if auto_select is not None else 0)
            else:
                self.advance(state)
        return state

    def summarize(self, state: SessionState) -> str:
        if state.stage is not Stage.SUMMARY:
            raise WrongStageError(f"summary requested at {state.stage.value}")
        self.advance(state)
        if state.stage is Stage.FAILED:
            raise SessionError(state.failure or "summary stage failed")
        return state.summary or ""

    def _fail(self, state: SessionState, cause: str) -> None:
        state.failure = cause
        state.stage = Stage.FAILED
        self._emit(state, "stage_entered", stage=Stage.FAILED.value)
        self._say(state, Stage.FAILED, f"Session failed: {cause}")

    # -- backend plumbing ----------------------------------------------

    def _request(self, state: SessionState, stage: str, prompt_args: dict,
                 images: tuple[AttachedImage, ...], structured: dict) -> dict:
        request = BackendRequest(
            stage=stage,
            system_prompt=load_prompt("system"),
            user_prompt=load_prompt(stage).format(**prompt_args),
            images=images,
            schema_id=stage,
            temperature=self.temperature,
            structured=structured,
        )
        response = self.backend.complete(request)
        if response.payload is None:
            raise GatewayError(f"backend returned no structured payload for stage {stage!r}")
        return response.payload

    @staticmethod
    def _findings_json(report: HistogramReport) -> str:
        doc = report.to_dict()
        # bins are too bulky for a prompt; features carry the signal
        for channel in doc["channels"].values():
            channel.pop("bins")
        return canonical_json(doc)

    # -- stages ---------------------------------------------------------

    def _do_content_description(self, state: SessionState) -> None:
        payload = self._request(
            state, "content_description",
            {"findings_json": self._findings_json(state.source_report)},
            (_attach(state.source, "source"),),
            {"histogram_report": state.source_report.to_dict()},
        )
        state.content_description = payload["description"]
        self._say(state, Stage.CONTENT_DESCRIPTION, payload["description"])
        self._enter(state, Stage.STRATEGY_PROPOSAL)

    def _do_strategy_proposal(self, state: SessionState) -> None:
        payload = self._request(
            state, "strategy_proposal",
            {
                "content_description": state.content_description or "",
                "instruction": state.instruction or "",
                "findings_json": self._findings_json(state.source_report),
            },
            (_attach(state.source, "source"),),
            {"histogram_report": state.source_report.to_dict(),
             "instruction": state.instruction or ""},
        )
        approaches = payload["approaches"]
        if len(approaches) != 3:
            raise GatewayError(f"expected exactly 3 approaches, got {len(approaches)}")
        state.strategies = [Approach.from_dict(a) for a in approaches]
        lines = [
            f"Approach {i + 1}: {a.name}. Light: {a.light} Color: {a.color} Mixer: {a.mixer_notes}"
            for i, a in enumerate(state.strategies)
        ]
        self._say(state, Stage.STRATEGY_PROPOSAL, "\n".join(lines))
        self._enter(state, Stage.AWAIT_USER_DIRECTION)

    def _do_final_plan(self, state: SessionState) -> None:
        approach = (state.strategies[state.chosen_approach].to_dict()
                    if state.chosen_approach is not None else None)
        payload = self._request(
            state, "final_plan",
            {
                "approach_json": canonical_json(approach) if approach else "",
                "direction": state.direction_text or state.instruction or "",
                "style_directives": "\n".join(state.style_directives),
            },
            (_attach(state.source, "source"),),
            {
                "approach": approach,
                "instruction": state.direction_text or state.instruction or "",
                "style_directives": list(state.style_directives),
                "histogram_report": state.source_report.to_dict(),
            },
        )
        state.plan = payload["plan"]
        self._say(state, Stage.FINAL_PLAN, payload["plan"])
        state.current_iteration = 1
        state.working = WorkingIteration()
        self._enter(state, Stage.TONE_ANALYSIS)

    def _analysis_report(self, state: SessionState) -> HistogramReport:
        if state.iterations:
            return state.iterations[-1].report
        return state.source_report

    def _do_tone_analysis(self, state: SessionState) -> None:
        current = state.current_image()
        report = self._analysis_report(state)
        plot = render_histogram_image(report)
        payload = self._request(
            state, "tone_analysis",
            {"findings_json": self._findings_json(report)},
            (_attach(current, "current"), _attach(plot, "histogram")),
            {"histogram_report": report.to_dict(), "iteration": state.current_iteration},
        )
        state.working = WorkingIteration(tone_analysis=payload["analysis"])
        self._say(state, Stage.TONE_ANALYSIS, payload["analysis"])
        self._enter(state, Stage.PARAM_GENERATION)

    def _do_param_generation(self, state: SessionState) -> None:
        report = self._analysis_report(state)
        previous = (P.params_to_dict(state.iterations[-1].params)
                    if state.iterations else P.params_to_dict(P.identity_params()))
        critique = state.iterations[-1].verdict.critique if state.iterations else ""
        payload = self._request(
            state, "param_generation",
            {
                "iteration": state.current_iteration,
                "plan": state.plan or "",
                "previous_params_json": canonical_json(previous),
                "critique": critique,
                "findings_json": self._findings_json(report),
            },
            (_attach(state.current_image(), "current"),),
            {
                "histogram_report": report.to_dict(),
                "previous_params": previous,
                "iteration": state.current_iteration,
                "max_iterations": state.max_iterations,
                "critique": critique,
            },
        )
        params = P.params_from_dict(payload["params"])
        state.working.params = params
        state.working.rationale = payload["rationale"]
        self._say(state, Stage.PARAM_GENERATION, payload["rationale"])
        self._emit(state, "params_proposed", iteration=state.current_iteration,
                   params=P.params_to_dict(params))
        self._enter(state, Stage.RENDER)

    def _do_render(self, state: SessionState) -> None:
        rendered, trace = engine.render(state.source, state.working.params)
        state.working.image = rendered
        state.working.image_digest = rendered.digest()
        state.working.report = compute_histogram(rendered)
        total = sum(s.seconds for s in trace.stages)
        self._say(state, Stage.RENDER,
                  f"Applied iteration {state.current_iteration} parameters to the source "
                  f"image in {total * 1000:.1f} ms (output {state.working.image_digest[:12]}).")
        self._emit(state, "image_rendered", iteration=state.current_iteration,
                   digest=state.working.image_digest)
        self._enter(state, Stage.REFLECTION)

    def _do_reflection(self, state: SessionState) -> None:
        work = state.working
        plot = render_histogram_image(work.report)
        payload = self._request(
            state, "reflection",
            {
                "iteration": state.current_iteration,
                "max_iterations": state.max_iterations,
                "plan": state.plan or "",
                "findings_json": self._findings_json(work.report),
            },
            (
                _attach(state.source, "source"),
                _attach(work.image, "current"),
                _attach(plot, "histogram"),
            ),
            {
                "histogram_report": work.report.to_dict(),
                "iteration": state.current_iteration,
                "max_iterations": state.max_iterations,
                "instruction": state.direction_text or state.instruction or "",
            },
        )
        verdict = ReflectionVerdict.from_payload(payload)
        record = IterationRecord(
            index=state.current_iteration,
            params=work.params,
            image=work.image,
            image_digest=work.image_digest,
            report=work.report,
            verdict=verdict,
            tone_analysis=work.tone_analysis,
            rationale=work.rationale,
        )
        state.iterations.append(record)
        self._say(state, Stage.REFLECTION, verdict.critique)
        self._emit(state, "verdict", iteration=record.index,
                   satisfactory=verdict.satisfactory, critique=verdict.critique)
        if verdict.satisfactory:
            state.outcome = "satisfied"
            self._enter(state, Stage.SUMMARY)
        elif state.current_iteration < state.max_iterations:
            state.current_iteration += 1
            state.working = WorkingIteration()
            self._enter(state, Stage.TONE_ANALYSIS)
        else:
            state.outcome = "cap_reached"
            self._enter(state, Stage.SUMMARY)

    # -- resume support ---------------------------------------------------

    @staticmethod
    def rehydrate(state: SessionState) -> None:
        """Rebuild derived pixel state a snapshot cannot carry. The
        render stage is deterministic, so a reflection-entry snapshot
        regenerates its pending image exactly."""
        if state.stage is Stage.REFLECTION and state.working.params is not None \
                and state.working.image is None:
            rendered, _ = engine.render(state.source, state.working.params)
            state.working.image = rendered
            state.working.image_digest = rendered.digest()
            state.working.report = compute_histogram(rendered)

    @staticmethod
    def consumed_exchanges(state: SessionState) -> int:
        """How many backend exchanges a session has performed so far;
        lets a resumed replay backend skip to the right cursor."""
        n = 0
        if state.content_description is not None:
            n += 1
        if state.strategies:
            n += 1
        if state.plan is not None:
            n += 1
        n += 3 * len(state.iterations)
        if state.stage is Stage.PARAM_GENERATION:
            n += 1  # tone analysis of the pending iteration
        elif state.stage in (Stage.RENDER, Stage.REFLECTION):
            n += 2  # tone analysis + parameter generation
        if state.summary is not None:
            n += 1
        return n

    def _do_summary(self, state: SessionState) -> None:
        if not state.iterations:
            raise SessionError("cannot summarize a session with no iterations")
        history = [
            {"index": rec.index, "satisfactory": rec.verdict.satisfactory,
             "params": P.params_to_dict(rec.params)}
            for rec in state.iterations
        ]
        payload = self._request(
            state, "summary",
            {
                "outcome": state.outcome or "satisfied",
                "iterations_json": json.dumps(history, sort_keys=True),
            },
            (_attach(state.current_image(), "current"),),
            {"iterations": history, "outcome": state.outcome,
             "instruction": state.direction_text or state.instruction or ""},
        )
        state.summary = payload["summary"]
        self._say(state, Stage.SUMMARY, payload["summary"])
        self._enter(state, Stage.DONE)
        self._emit(state, "done", outcome=state.outcome,
                   iterations=len(state.iterations))
