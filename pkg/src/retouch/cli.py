"""Command-line entry points.

Exit codes are a stable contract:
    0  success
    2  validation failure (bad parameters, bad flag combinations)
    3  I/O failure (missing or unreadable files, undecodable images)
    4  backend failure (transport, schema, or session failure)
    5  divergence (replay verification failed or replay mismatched)
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import params as P
from .agent import Orchestrator, Stage
from .config import AppConfig
from .engine import render
from .gateway import RecordingBackend, Transcript, TranscriptFormatError
from .histogram import compute_histogram, render_histogram_image
from .image import ImageDecodeError, load_image, png_bytes, save_image
from .replay import attach_outcome, replay_session, verify_replay

EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_BACKEND = 4
EXIT_DIVERGENCE = 5


class Reporter:
    def __init__(self, quiet: bool, json_logs: bool):
        self.quiet = quiet
        self.json_logs = json_logs

    def info(self, message: str, **fields) -> None:
        if self.quiet:
            return
        if self.json_logs:
            click.echo(json.dumps({"level": "info", "message": message, **fields}, sort_keys=True))
        else:
            click.echo(message)

    def error(self, message: str) -> None:
        if self.json_logs:
            click.echo(json.dumps({"level": "error", "message": message}, sort_keys=True), err=True)
        else:
            click.echo(f"error: {message}", err=True)


def _load_image_or_exit(reporter: Reporter, path):
    try:
        return load_image(path)
    except FileNotFoundError:
        reporter.error(f"no such file: {path}")
        sys.exit(EXIT_IO)
    except (ImageDecodeError, OSError) as exc:
        reporter.error(f"cannot read image {path}: {exc}")
        sys.exit(EXIT_IO)


def _build_config(config_path, backend, temperature, max_iters, store_root, port, transcript):
    config = AppConfig.from_file(config_path) if config_path else AppConfig.from_env()
    return config.override(
        backend=backend, temperature=temperature, max_iterations=max_iters,
        store_root=store_root, port=port, transcript_path=transcript,
    )


@click.group()
@click.option("--quiet", is_flag=True, help="Suppress informational output.")
@click.option("--json-logs", is_flag=True, help="Emit log lines as JSON objects.")
@click.pass_context
def main(ctx, quiet, json_logs):
    """Parametric photo retouching: direct engine application, histogram
    tooling, agent runs, and transcript replay."""
    ctx.obj = Reporter(quiet, json_logs)


@main.command()
@click.option("--params", "params_path", required=True, type=click.Path(), help="Parameter JSON file.")
@click.argument("input_path", type=click.Path())
@click.argument("output_path", type=click.Path())
@click.pass_obj
def apply(reporter: Reporter, params_path, input_path, output_path):
    """Render INPUT_PATH under a parameter file into OUTPUT_PATH."""
    try:
        text = pathlib.Path(params_path).read_text()
    except OSError as exc:
        reporter.error(f"cannot read parameters {params_path}: {exc}")
        sys.exit(EXIT_IO)
    try:
        params = P.from_json(text)
    except (P.ParamJsonError, P.ParamValidationError) as exc:
        reporter.error(f"invalid parameters: {exc}")
        sys.exit(EXIT_VALIDATION)
    source = _load_image_or_exit(reporter, input_path)
    rendered, trace = render(source, params)
    try:
        save_image(rendered, output_path)
    except OSError as exc:
        reporter.error(f"cannot write {output_path}: {exc}")
        sys.exit(EXIT_IO)
    total_ms = sum(s.seconds for s in trace.stages) * 1000
    reporter.info(f"rendered {input_path} -> {output_path} in {total_ms:.1f} ms",
                  output=str(output_path))


@main.command()
@click.argument("input_path", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Print the full report as JSON.")
@click.option("--png", "png_path", type=click.Path(), help="Write the histogram plot PNG.")
@click.pass_obj
def histogram(reporter: Reporter, input_path, as_json, png_path):
    """Compute the tone report for INPUT_PATH."""
    source = _load_image_or_exit(reporter, input_path)
    report = compute_histogram(source)
    if png_path:
        try:
            with open(png_path, "wb") as fh:
                fh.write(png_bytes(render_histogram_image(report)))
        except OSError as exc:
            reporter.error(f"cannot write {png_path}: {exc}")
            sys.exit(EXIT_IO)
        reporter.info(f"wrote histogram plot to {png_path}")
    if as_json or not png_path:
        click.echo(json.dumps(report.to_dict(), sort_keys=True))


@main.group()
def agent():
    """Run or replay full retouching sessions."""


def _write_session_outputs(reporter: Reporter, state, out_dir: pathlib.Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for record in state.iterations:
        if record.image is not None:
            save_image(record.image, out_dir / f"iter_{record.index:02d}.jpg")
        (out_dir / f"iter_{record.index:02d}.json").write_text(P.to_json(record.params) + "\n")
    with open(out_dir / "events.jsonl", "w") as fh:
        for event in state.events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
    if state.summary:
        (out_dir / "summary.txt").write_text(state.summary + "\n")
    reporter.info(f"wrote {len(state.iterations)} iteration(s) to {out_dir}",
                  iterations=len(state.iterations))


@agent.command("run")
@click.option("--image", "image_path", required=True, type=click.Path())
@click.option("--instruction", default=None)
@click.option("--backend", "backend_name",
              type=click.Choice(["heuristic", "openai_compatible", "replay"]), default=None)
@click.option("--record", "record_path", type=click.Path(), default=None,
              help="Record backend exchanges to this transcript.")
@click.option("--replay", "replay_path", type=click.Path(), default=None,
              help="Transcript to replay (forces the replay backend).")
@click.option("--max-iters", type=int, default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_obj
def agent_run(reporter: Reporter, image_path, instruction, backend_name, record_path,
              replay_path, max_iters, temperature, config_path, out_dir):
    """Run a full session against IMAGE and write artifacts to --out-dir."""
    if record_path and replay_path:
        reporter.error("--record and --replay are mutually exclusive")
        sys.exit(EXIT_VALIDATION)
    if replay_path:
        backend_name = "replay"
    config = _build_config(config_path, backend_name, temperature, max_iters,
                           None, None, replay_path)
    try:
        backend = config.make_backend()
    except (ValueError, TranscriptFormatError, OSError) as exc:
        reporter.error(str(exc))
        sys.exit(EXIT_VALIDATION)

    transcript = None
    if record_path:
        transcript = Transcript(meta={"max_iterations": config.max_iterations, "approach_index": 0})
        backend = RecordingBackend(backend, transcript)

    source = _load_image_or_exit(reporter, image_path)
    orch = Orchestrator(backend, max_iterations=config.max_iterations)
    state = orch.start(source, instruction)
    if transcript is not None:
        transcript.meta["source_digest"] = state.source_digest
    state = orch.run_to_completion(state)
    _write_session_outputs(reporter, state, pathlib.Path(out_dir))

    if state.stage is Stage.FAILED:
        reporter.error(f"session failed: {state.failure}")
        sys.exit(EXIT_BACKEND)
    if transcript is not None:
        attach_outcome(transcript, state)
        transcript.save(record_path)
        reporter.info(f"recorded transcript to {record_path}")
    reporter.info(f"session done: outcome {state.outcome}, "
                  f"{len(state.iterations)} iteration(s)", outcome=state.outcome)


@agent.command("replay")
@click.argument("transcript_path", type=click.Path())
@click.option("--image", "image_path", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--verify", is_flag=True,
              help="Exit 5 unless the replay matches the recording exactly.")
@click.pass_obj
def agent_replay(reporter: Reporter, transcript_path, image_path, out_dir, verify):
    """Re-execute a recorded session from TRANSCRIPT_PATH."""
    source = _load_image_or_exit(reporter, image_path)

    if verify:
        try:
            problems = verify_replay(transcript_path, source)
        except OSError as exc:
            reporter.error(f"cannot read transcript {transcript_path}: {exc}")
            sys.exit(EXIT_IO)
        if problems:
            for problem in problems:
                reporter.error(problem)
            sys.exit(EXIT_DIVERGENCE)

    try:
        from .gateway import load_transcript

        transcript = load_transcript(transcript_path)
    except FileNotFoundError:
        reporter.error(f"no such transcript: {transcript_path}")
        sys.exit(EXIT_IO)
    except TranscriptFormatError as exc:
        reporter.error(str(exc))
        sys.exit(EXIT_DIVERGENCE if verify else EXIT_IO)

    meta_digest = transcript.meta.get("source_digest")
    if meta_digest and meta_digest != source.digest():
        reporter.error("source image digest mismatch: wrong image for this recording")
        sys.exit(EXIT_DIVERGENCE)

    state = replay_session(transcript, source)
    _write_session_outputs(reporter, state, pathlib.Path(out_dir))
    if state.stage is not Stage.DONE:
        reporter.error(f"replay ended {state.stage.value}: {state.failure}")
        sys.exit(EXIT_DIVERGENCE)
    reporter.info(f"replayed {len(state.iterations)} iteration(s), outcome {state.outcome}",
                  outcome=state.outcome)


@main.command()
@click.option("--port", type=int, default=None)
@click.option("--store-root", type=click.Path(), default=None)
@click.option("--backend", "backend_name",
              type=click.Choice(["heuristic", "openai_compatible", "replay"]), default=None)
@click.option("--transcript", type=click.Path(), default=None,
              help="Transcript for the replay backend.")
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory of built console assets to serve at /.")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.pass_obj
def serve(reporter: Reporter, port, store_root, backend_name, transcript, static_dir, config_path):
    """Start the session service."""
    import uvicorn

    from .service import create_app

    config = _build_config(config_path, backend_name, None, None, store_root, port, transcript)
    reporter.info(f"serving on port {config.port} (backend {config.backend}, "
                  f"store {config.store_root})")
    uvicorn.run(create_app(config, static_dir=static_dir), host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
