import json

import pytest
from click.testing import CliRunner

from retouch import params as P
from retouch.cli import main
from retouch.fixtures import DEMO_SESSIONS, demo_image_path, demo_transcript_path, iteration_count
from retouch.image import load_image, png_bytes, save_image

from tests.conftest import uniform_image


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def gray_file(tmp_path):
    path = tmp_path / "gray.png"
    path.write_bytes(png_bytes(uniform_image(128)))
    return path


def write_params(tmp_path, params) -> str:
    path = tmp_path / "params.json"
    path.write_text(P.to_json(params))
    return str(path)


class TestApply:
    def test_identity_round_trip_bit_equal(self, runner, tmp_path, gray_file):
        params_path = write_params(tmp_path, P.identity_params())
        out = tmp_path / "out.png"
        result = runner.invoke(main, ["apply", "--params", params_path, str(gray_file), str(out)])
        assert result.exit_code == 0, result.output
        assert load_image(out) == load_image(gray_file)

    def test_demo_iteration_params_apply_cleanly(self, runner, tmp_path, gray_file):
        from retouch.fixtures import demo_param_text

        params_path = tmp_path / "p.json"
        params_path.write_text(demo_param_text("coastal_cliffs", 2))
        out = tmp_path / "out.png"
        result = runner.invoke(main, ["apply", "--params", str(params_path),
                                      str(gray_file), str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_missing_input_exit_3(self, runner, tmp_path):
        params_path = write_params(tmp_path, P.identity_params())
        result = runner.invoke(main, ["apply", "--params", params_path,
                                      str(tmp_path / "absent.png"), str(tmp_path / "o.png")])
        assert result.exit_code == 3

    def test_invalid_params_exit_2(self, runner, tmp_path, gray_file):
        bad = tmp_path / "bad.json"
        bad.write_text('{"exposure": 9.5}')
        result = runner.invoke(main, ["apply", "--params", str(bad),
                                      str(gray_file), str(tmp_path / "o.png")])
        assert result.exit_code == 2

    def test_jpeg_output_supported(self, runner, tmp_path, gray_file):
        params_path = write_params(tmp_path, P.identity_params())
        out = tmp_path / "out.jpg"
        result = runner.invoke(main, ["apply", "--params", params_path, str(gray_file), str(out)])
        assert result.exit_code == 0
        assert out.read_bytes()[:2] == b"\xff\xd8"  # JPEG magic


class TestHistogram:
    def test_uniform_gray_midtone_fraction(self, runner, gray_file):
        result = runner.invoke(main, ["histogram", str(gray_file), "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output.strip().splitlines()[-1])
        assert doc["midtone_fraction"] == 1.0

    def test_plot_bytes_deterministic(self, runner, tmp_path, gray_file):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        assert runner.invoke(main, ["--quiet", "histogram", str(gray_file), "--png", str(a)]).exit_code == 0
        assert runner.invoke(main, ["--quiet", "histogram", str(gray_file), "--png", str(b)]).exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_file_exit_3(self, runner, tmp_path):
        assert runner.invoke(main, ["histogram", str(tmp_path / "nope.png")]).exit_code == 3


class TestAgentRun:
    def test_heuristic_gray_single_iteration(self, runner, tmp_path, gray_file):
        out_dir = tmp_path / "out"
        result = runner.invoke(main, [
            "agent", "run", "--image", str(gray_file), "--backend", "heuristic",
            "--out-dir", str(out_dir),
        ])
        assert result.exit_code == 0, result.output
        assert (out_dir / "iter_01.jpg").exists()
        assert (out_dir / "iter_01.json").exists()
        assert (out_dir / "summary.txt").exists()
        events = [json.loads(line) for line in (out_dir / "events.jsonl").read_text().splitlines()]
        assert events[-1]["type"] == "done"
        assert events[-1]["iterations"] == 1

    def test_record_then_verify_round_trip(self, runner, tmp_path, gray_file):
        transcript = tmp_path / "session.jsonl"
        result = runner.invoke(main, [
            "agent", "run", "--image", str(gray_file), "--backend", "heuristic",
            "--record", str(transcript), "--out-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 0, result.output
        verify = runner.invoke(main, [
            "agent", "replay", str(transcript), "--image", str(gray_file),
            "--out-dir", str(tmp_path / "replayed"), "--verify",
        ])
        assert verify.exit_code == 0, verify.output

    def test_record_and_replay_flags_exclusive(self, runner, tmp_path, gray_file):
        result = runner.invoke(main, [
            "agent", "run", "--image", str(gray_file),
            "--record", str(tmp_path / "a.jsonl"), "--replay", str(tmp_path / "b.jsonl"),
            "--out-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 2

    def test_cap_one_adversarial_recording_replays_cap_reached(self, runner, tmp_path, gray_file):
        # record a never-satisfied session at cap 1, then replay via the CLI
        from retouch.agent import Orchestrator
        from retouch.gateway import CallbackBackend, HeuristicBackend, RecordingBackend, Transcript
        from retouch.gateway.base import BackendRequest
        from retouch.replay import attach_outcome

        heuristic = HeuristicBackend()

        def respond(stage, structured):
            if stage == "reflection":
                return {"satisfactory": False, "critique": "Keep going.", "directives": []}
            return heuristic.complete(BackendRequest(
                stage=stage, user_prompt="x", schema_id=stage, structured=structured)).payload

        transcript = Transcript(meta={"max_iterations": 1, "approach_index": 0})
        backend = RecordingBackend(CallbackBackend(respond), transcript)
        orch = Orchestrator(backend, max_iterations=1)
        state = orch.run_to_completion(orch.start(load_image(gray_file)))
        assert state.outcome == "cap_reached" and len(state.iterations) == 1
        transcript.meta["source_digest"] = state.source_digest
        attach_outcome(transcript, state)
        transcript_path = tmp_path / "capped.jsonl"
        transcript.save(transcript_path)

        result = runner.invoke(main, [
            "agent", "replay", str(transcript_path), "--image", str(gray_file),
            "--out-dir", str(tmp_path / "out"), "--verify",
        ])
        assert result.exit_code == 0, result.output
        events = [json.loads(line) for line in (tmp_path / "out" / "events.jsonl").read_text().splitlines()]
        assert events[-1]["outcome"] == "cap_reached"
        assert events[-1]["iterations"] == 1


class TestAgentReplay:
    @pytest.mark.parametrize("name", DEMO_SESSIONS)
    def test_all_demo_transcripts_verify(self, runner, tmp_path, name):
        result = runner.invoke(main, [
            "--quiet", "agent", "replay", demo_transcript_path(name),
            "--image", demo_image_path(name),
            "--out-dir", str(tmp_path / name), "--verify",
        ])
        assert result.exit_code == 0, result.output
        expected = iteration_count(name)
        produced = len(list((tmp_path / name).glob("iter_*.jpg")))
        assert produced == expected

    def test_tampered_param_exits_5(self, runner, tmp_path):
        source = demo_transcript_path("coastal_cliffs")
        data = open(source, "rb").read().replace(b'"exposure":0.5', b'"exposure":0.9', 1)
        tampered = tmp_path / "tampered.jsonl"
        tampered.write_bytes(data)
        result = runner.invoke(main, [
            "agent", "replay", str(tampered), "--image", demo_image_path("coastal_cliffs"),
            "--out-dir", str(tmp_path / "out"), "--verify",
        ])
        assert result.exit_code == 5

    def test_wrong_image_digest_mismatch(self, runner, tmp_path):
        result = runner.invoke(main, [
            "agent", "replay", demo_transcript_path("coastal_cliffs"),
            "--image", demo_image_path("dusk_tree"),
            "--out-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 5

    def test_missing_transcript_exit_3(self, runner, tmp_path, gray_file):
        result = runner.invoke(main, [
            "agent", "replay", str(tmp_path / "none.jsonl"),
            "--image", str(gray_file), "--out-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 3


class TestLogging:
    def test_json_logs_mode(self, runner, tmp_path, gray_file):
        params_path = write_params(tmp_path, P.identity_params())
        result = runner.invoke(main, ["--json-logs", "apply", "--params", params_path,
                                      str(gray_file), str(tmp_path / "o.png")])
        assert result.exit_code == 0
        doc = json.loads(result.output.strip().splitlines()[-1])
        assert doc["level"] == "info"

    def test_quiet_suppresses_info(self, runner, tmp_path, gray_file):
        params_path = write_params(tmp_path, P.identity_params())
        result = runner.invoke(main, ["--quiet", "apply", "--params", params_path,
                                      str(gray_file), str(tmp_path / "o.png")])
        assert result.exit_code == 0
        assert result.output.strip() == ""
