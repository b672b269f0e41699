"""HTTP facade: session lifecycle, steering, artifacts, and the
server-sent event stream the web console consumes.

Endpoints (all JSON unless noted):
    POST /api/sessions                      multipart image + optional instruction
    GET  /api/sessions                      session summaries
    GET  /api/sessions/{id}                 full session state
    POST /api/sessions/{id}/direction       {"approach_index": n} or {"text": ...}
    POST /api/sessions/{id}/run             {"mode": "step"|"auto"}
    POST /api/sessions/{id}/reference       multipart reference image [+ params JSON]
    GET  /api/sessions/{id}/iterations/{n}/image      PNG
    GET  /api/sessions/{id}/iterations/{n}/histogram  PNG
    GET  /api/sessions/{id}/events          text/event-stream (Last-Event-ID resume)
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, Form, HTTPException, Request, UploadFile
from fastapi.responses import Response, StreamingResponse
from pydantic import BaseModel

from . import params as P
from .agent import Orchestrator, SessionState, Stage, WrongStageError
from .config import AppConfig
from .gateway import GatewayError, ReplayBackend
from .histogram import render_histogram_image
from .image import ImageDecodeError, decode_image, png_bytes
from .storage import SessionStore, SnapshotCorruptError
from .style import parse_reference_case, parse_reference_image

# stages at which style references may still be attached
_PRE_PLAN_STAGES = (
    Stage.CONTENT_DESCRIPTION, Stage.STRATEGY_PROPOSAL, Stage.AWAIT_USER_DIRECTION,
)

_EVENT_POLL_SECONDS = 0.05
MAX_UPLOAD_BYTES = 64 * 1024 * 1024


class DirectionBody(BaseModel):
    approach_index: int | None = None
    text: str | None = None


class RunBody(BaseModel):
    mode: str = "auto"


@dataclass
class SessionRuntime:
    state: SessionState
    orchestrator: Orchestrator
    lock: threading.Lock


def create_app(config: AppConfig | None = None, static_dir: str | None = None) -> FastAPI:
    config = config or AppConfig()
    store = SessionStore(config.store_root)
    app = FastAPI(title="retouch session service")
    registry: dict[str, SessionRuntime] = {}
    registry_lock = threading.Lock()

    def event_sink(state: SessionState, event: dict) -> None:
        store.append_event(state, event)

    def new_orchestrator(resumed: SessionState | None = None) -> Orchestrator:
        backend = config.make_backend()
        if resumed is not None and isinstance(backend, ReplayBackend):
            backend.skip(Orchestrator.consumed_exchanges(resumed))
        return Orchestrator(
            backend,
            max_iterations=config.max_iterations,
            temperature=None if config.backend != "openai_compatible" else config.temperature,
            event_sink=event_sink,
        )

    def get_runtime(session_id: str) -> SessionRuntime:
        with registry_lock:
            runtime = registry.get(session_id)
            if runtime is not None:
                return runtime
            if not store.exists(session_id):
                raise HTTPException(404, f"unknown session {session_id!r}")
            try:
                state = store.restore(session_id)
            except SnapshotCorruptError as exc:
                raise HTTPException(500, f"session unrecoverable: {exc}")
            runtime = SessionRuntime(state=state, orchestrator=new_orchestrator(state),
                                     lock=threading.Lock())
            registry[session_id] = runtime
            return runtime

    def state_payload(state: SessionState) -> dict:
        return state.to_dict()

    # -- lifecycle -------------------------------------------------------

    def _read_upload(upload: UploadFile) -> bytes:
        data = upload.file.read(MAX_UPLOAD_BYTES + 1)
        if len(data) > MAX_UPLOAD_BYTES:
            raise HTTPException(422, f"image exceeds the {MAX_UPLOAD_BYTES // (1024 * 1024)} MB upload limit")
        return data

    @app.post("/api/sessions", status_code=201)
    def create_session(image: UploadFile, instruction: str | None = Form(default=None)):
        try:
            source = decode_image(_read_upload(image))
        except ImageDecodeError as exc:
            raise HTTPException(422, f"cannot decode uploaded image: {exc}")
        orchestrator = new_orchestrator()
        # session folder does not exist until create(); buffer the start
        # events and flush them once it does
        orchestrator.event_sink = None
        state = orchestrator.start(source, instruction or None)
        store.create(state)
        for event in state.events:
            store.append_event(state, event)
        orchestrator.event_sink = event_sink
        with registry_lock:
            registry[state.session_id] = SessionRuntime(
                state=state, orchestrator=orchestrator, lock=threading.Lock())
        return state_payload(state)

    @app.get("/api/sessions")
    def list_sessions():
        summaries = []
        with registry_lock:
            known = dict(registry)
        for session_id in store.list_sessions():
            runtime = known.get(session_id)
            if runtime is not None:
                state = runtime.state
                summaries.append({"session_id": session_id, "stage": state.stage.value,
                                  "created_at": state.created_at,
                                  "iterations": len(state.iterations)})
            else:
                summaries.append({"session_id": session_id, "stage": None,
                                  "created_at": None, "iterations": None})
        return summaries

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return state_payload(get_runtime(session_id).state)

    # -- steering --------------------------------------------------------

    @app.post("/api/sessions/{session_id}/direction")
    def post_direction(session_id: str, body: DirectionBody):
        if body.approach_index is None and body.text is None:
            raise HTTPException(422, "provide approach_index or text")
        runtime = get_runtime(session_id)
        with runtime.lock:
            try:
                runtime.orchestrator.inject_instruction(
                    runtime.state, approach_index=body.approach_index, text=body.text)
            except WrongStageError as exc:
                raise HTTPException(409, str(exc))
            except Exception as exc:  # bad index and friends
                raise HTTPException(422, str(exc))
            store.persist(runtime.state)
            return state_payload(runtime.state)

    @app.post("/api/sessions/{session_id}/run")
    def post_run(session_id: str, body: RunBody):
        if body.mode not in ("step", "auto"):
            raise HTTPException(422, f"unknown run mode {body.mode!r}")
        runtime = get_runtime(session_id)
        with runtime.lock:
            state = runtime.state
            if state.stage in (Stage.DONE, Stage.FAILED):
                raise HTTPException(409, f"session already {state.stage.value}")
            try:
                if body.mode == "step":
                    if state.stage is Stage.AWAIT_USER_DIRECTION:
                        raise HTTPException(409, "session awaits direction; post it first")
                    runtime.orchestrator.advance(state)
                else:
                    runtime.orchestrator.run_to_completion(state)
            finally:
                store.persist(state)
            if state.stage is Stage.FAILED:
                raise HTTPException(502, f"backend failure: {state.failure}")
            return state_payload(state)

    @app.post("/api/sessions/{session_id}/reference")
    def post_reference(session_id: str, image: UploadFile,
                       params: str | None = Form(default=None)):
        runtime = get_runtime(session_id)
        with runtime.lock:
            state = runtime.state
            if state.stage not in _PRE_PLAN_STAGES:
                raise HTTPException(409, f"references only before planning, not at {state.stage.value}")
            try:
                reference = decode_image(_read_upload(image))
            except ImageDecodeError as exc:
                raise HTTPException(422, f"cannot decode reference image: {exc}")
            try:
                if params is not None:
                    directive = parse_reference_case(reference, P.from_json(params))
                else:
                    directive = parse_reference_image(
                        runtime.orchestrator.backend, reference,
                        temperature=runtime.orchestrator.temperature)
            except (P.ParamJsonError, P.ParamValidationError) as exc:
                raise HTTPException(422, str(exc))
            except GatewayError as exc:
                raise HTTPException(502, f"style parser backend failure: {exc}")
            state.style_directives.append(directive.text)
            store.persist(state)
            return {"directive": directive.text, "source_kind": directive.source_kind}

    # -- artifacts ---------------------------------------------------------

    def _get_record(session_id: str, index: int):
        runtime = get_runtime(session_id)
        for record in runtime.state.iterations:
            if record.index == index:
                return runtime, record
        raise HTTPException(404, f"session has no iteration {index}")

    @app.get("/api/sessions/{session_id}/source")
    def source_image(session_id: str):
        runtime = get_runtime(session_id)
        return Response(content=png_bytes(runtime.state.source), media_type="image/png")

    @app.get("/api/sessions/{session_id}/iterations/{index}/image")
    def iteration_image(session_id: str, index: int):
        runtime, record = _get_record(session_id, index)
        path = store.iteration_image_path(session_id, index)
        if record.image is not None:
            data = png_bytes(record.image)
        elif path.exists():
            data = path.read_bytes()
        else:
            raise HTTPException(404, f"iteration {index} image not stored")
        return Response(content=data, media_type="image/png")

    @app.get("/api/sessions/{session_id}/iterations/{index}/histogram")
    def iteration_histogram(session_id: str, index: int):
        _, record = _get_record(session_id, index)
        plot = render_histogram_image(record.report)
        return Response(content=png_bytes(plot), media_type="image/png")

    # -- events ------------------------------------------------------------

    @app.get("/api/sessions/{session_id}/events")
    def event_stream(session_id: str, request: Request):
        get_runtime(session_id)  # 404 on unknown
        raw_last = request.headers.get("last-event-id") or request.query_params.get("last_event_id") or "0"
        try:
            last_seq = int(raw_last)
        except ValueError:
            raise HTTPException(422, f"bad Last-Event-ID {raw_last!r}")

        def stream():
            seq = last_seq
            while True:
                events = store.read_events(session_id, after_seq=seq)
                for event in events:
                    seq = event["seq"]
                    payload = json.dumps(event, sort_keys=True)
                    yield f"id: {event['seq']}\nevent: {event['type']}\ndata: {payload}\n\n"
                state = get_runtime(session_id).state
                if state.stage in (Stage.DONE, Stage.FAILED) and state.event_seq <= seq:
                    return
                time.sleep(_EVENT_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache"})

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
