"""Acceptance gate: one test per release criterion, each printing a
PASS line at its stated tolerance. Everything here runs offline."""

import io
import json
import time

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from retouch import engine
from retouch import histogram as H
from retouch import params as P
from retouch.agent import Orchestrator, Stage
from retouch.cli import main as cli_main
from retouch.config import AppConfig
from retouch.fixtures import (
    DEMO_SESSIONS,
    DEMO_VERDICTS,
    demo_image_bytes,
    demo_image_path,
    demo_param_text,
    demo_transcript_path,
    iteration_count,
)
from retouch.gateway import CallbackBackend, HeuristicBackend, load_transcript
from retouch.gateway.base import BackendRequest
from retouch.image import ImageBuffer, decode_image, png_bytes
from retouch.replay import replay_session
from retouch.service import create_app

from tests.conftest import color_chart, uniform_image
from tests.oracles import pixel_counts


def report(criterion: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS")


def random_params(rng) -> P.RetouchParams:
    mixer = P.HslMixer(**{
        name: P.HslChannelAdjustment(*rng.uniform(-100, 100, size=3))
        for name in P.MIXER_CHANNELS
    })
    basic = P.BasicAdjustments(
        exposure=rng.uniform(-5, 5), contrast=rng.uniform(-100, 100),
        highlights=rng.uniform(-100, 100), shadows=rng.uniform(-100, 100),
        whites=rng.uniform(-100, 100), blacks=rng.uniform(-100, 100),
        temp=rng.uniform(2000, 50000), tint=rng.uniform(-150, 150),
        vibrance=rng.uniform(-100, 100), saturation=rng.uniform(-100, 100),
    )
    return P.RetouchParams(basic=basic, mixer=mixer)


def test_engine_identity_bit_exact_on_50_random_images():
    rng = np.random.default_rng(1)
    identity = P.identity_params()
    started = time.perf_counter()
    for _ in range(50):
        w = int(rng.integers(16, 200))
        h = int(rng.integers(16, 200))
        img = ImageBuffer(pixels=rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))
        out, _ = engine.render(img, identity)
        assert out == img, "identity render must be bit-identical"
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"identity renders took {elapsed:.2f}s (budget 5s)"
    report(f"engine identity (50 images, {elapsed:.2f}s)")


def test_engine_properties_zero_violations():
    rng = np.random.default_rng(2)

    # exposure doubling: scaling is exactly 2**ev on linear values
    linear = rng.random((32, 32, 3)).astype(np.float32)
    for ev in (-3.0, -1.0, 0.5, 1.0, 2.5):
        out = engine.apply_exposure(linear, ev)
        expected = linear * np.float32(2.0 ** ev)
        assert np.array_equal(out, expected)

    # tone monotonicity: 10,000 random luminance pairs under random sliders
    violations = 0
    for _ in range(10_000):
        a, b = sorted(rng.uniform(0.0, 1.0, size=2))
        sliders = dict(
            blacks=rng.uniform(-100, 100), whites=rng.uniform(-100, 100),
            shadows=rng.uniform(-100, 100), highlights=rng.uniform(-100, 100),
            contrast=rng.uniform(-100, 100),
        )
        if engine.tone_curve(a, **sliders) > engine.tone_curve(b, **sliders):
            violations += 1
    assert violations == 0, f"{violations} monotonicity violations"

    # gray preservation through the neutral-white-balance pipeline
    for value in (0, 45, 128, 200, 255):
        img = uniform_image(value, 16, 16)
        params = random_params(rng)
        params = P.RetouchParams(
            basic=P.BasicAdjustments(**{
                **{f: getattr(params.basic, f) for f in P.BASIC_FIELDS},
                "temp": 6500.0, "tint": 0.0,
            }),
            mixer=params.mixer,
        )
        out, _ = engine.render(img, params)
        assert np.array_equal(out.pixels[..., 0], out.pixels[..., 1])
        assert np.array_equal(out.pixels[..., 1], out.pixels[..., 2])

    # no-NaN fuzz: 1,000 random valid parameter sets
    img = ImageBuffer(pixels=rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8))
    for _ in range(1_000):
        out, _ = engine.render(img, random_params(rng))
        assert out.pixels.dtype == np.uint8  # encode guarantees finite [0,255]
    report("engine properties (doubling, 10k monotonicity pairs, gray, 1k no-NaN fuzz)")


def test_saturation_floor_is_exactly_monochrome():
    out, _ = engine.render(color_chart(), P.RetouchParams(
        basic=P.BasicAdjustments(saturation=-100.0)))
    px = out.pixels
    assert np.array_equal(px[..., 0], px[..., 1]) and np.array_equal(px[..., 1], px[..., 2]), \
        "saturation -100 must collapse every pixel to R==G==B (tolerance 0)"
    report("saturation -100 monochrome (exact)")


def test_schema_fidelity_of_demo_parameter_tables():
    for name in DEMO_SESSIONS:
        for iteration in range(1, iteration_count(name) + 1):
            text = demo_param_text(name, iteration)
            parsed = P.parse_params(text)
            assert parsed.defaulted == ()
            assert P.validate(parsed.params).ok
            assert P.to_json(parsed.params) + "\n" == text, f"{name} iter{iteration} not byte-stable"

    p1 = P.from_json(demo_param_text("coastal_cliffs", 1))
    p2 = P.from_json(demo_param_text("coastal_cliffs", 2))
    delta = P.diff(p1, p2)
    assert delta.paths() == (
        "exposure", "contrast", "highlights", "shadows", "whites",
        "tint", "vibrance", "saturation",
        "mixer.orange.saturation", "mixer.yellow.saturation",
        "mixer.yellow.luminance", "mixer.blue.saturation",
    ), "first demo session change set must match exactly"
    by_path = {c.path: (c.old, c.new) for c in delta.changes}
    assert by_path["exposure"] == (0.5, 0.3)
    assert by_path["highlights"] == (-20.0, -30.0)
    report("schema fidelity (12 parameter tables + 12-field diff)")


def test_histogram_report_equals_brute_force_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = int(rng.integers(8, 64))
        h = int(rng.integers(8, 64))
        img = ImageBuffer(pixels=rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))
        got = H.compute_histogram(img)
        want = pixel_counts.report_features(
            [tuple(int(v) for v in px) for px in img.pixels.reshape(-1, 3)])
        for channel in ("red", "green", "blue"):
            gc, wc = got.channels[channel], want["channels"][channel]
            assert list(gc.bins) == wc["bins"], "integer counts must match exactly"
            assert gc.black_point == wc["black_point"]
            assert gc.white_point == wc["white_point"]
            assert abs(gc.mean - wc["mean"]) <= 1e-9
            assert abs(gc.shadow_clip_fraction - wc["shadow_clip_fraction"]) <= 1e-9
            assert abs(gc.highlight_clip_fraction - wc["highlight_clip_fraction"]) <= 1e-9
        assert abs(got.midtone_fraction - want["midtone_fraction"]) <= 1e-9
        assert abs(got.warm_cool_bias - want["warm_cool_bias"]) <= 1e-9
        assert abs(got.green_magenta_bias - want["green_magenta_bias"]) <= 1e-9
        assert got.dominant_channel == want["dominant_channel"]
    report("histogram oracle equivalence (20 images)")


def test_replay_fidelity_and_tamper_detection(tmp_path):
    # all five recordings replay to Done with the recorded verdicts and
    # bit-exact parameters
    for name in DEMO_SESSIONS:
        transcript = load_transcript(demo_transcript_path(name))
        state = replay_session(transcript, decode_image(demo_image_bytes(name)))
        assert state.stage is Stage.DONE
        assert tuple(r.verdict.satisfactory for r in state.iterations) == DEMO_VERDICTS[name]
        for rec, want in zip(state.iterations, transcript.outcome["iterations"]):
            assert P.params_to_dict(rec.params) == want["params"], f"{name}: params diverged"

    runner = CliRunner()
    for name in DEMO_SESSIONS:
        result = runner.invoke(cli_main, [
            "--quiet", "agent", "replay", demo_transcript_path(name),
            "--image", demo_image_path(name),
            "--out-dir", str(tmp_path / f"verify_{name}"), "--verify",
        ])
        assert result.exit_code == 0, f"{name}: verify failed\n{result.output}"

    # single-byte tampers at positions spread across the whole recording
    data = open(demo_transcript_path("coastal_cliffs"), "rb").read()
    positions = list(range(16, len(data) - 2, max(1, len(data) // 15)))
    for pos in positions:
        original = data[pos:pos + 1]
        if original == b"\n":
            pos += 1
            original = data[pos:pos + 1]
        replacement = b"x" if original != b"x" else b"y"
        tampered_path = tmp_path / "tampered.jsonl"
        tampered_path.write_bytes(data[:pos] + replacement + data[pos + 1:])
        result = runner.invoke(cli_main, [
            "--quiet", "agent", "replay", str(tampered_path),
            "--image", demo_image_path("coastal_cliffs"),
            "--out-dir", str(tmp_path / "tampered_out"), "--verify",
        ])
        assert result.exit_code == 5, \
            f"tamper at byte {pos} returned {result.exit_code}, want 5"
    report(f"replay fidelity (5 recordings verify, {len(positions)} tampers exit 5)")


@pytest.mark.parametrize("cap", [1, 3, 5])
def test_loop_bound_under_adversarial_backend(cap):
    heuristic = HeuristicBackend()

    def respond(stage, structured):
        if stage == "reflection":
            return {"satisfactory": False, "critique": "Never satisfied.", "directives": []}
        return heuristic.complete(BackendRequest(
            stage=stage, user_prompt="x", schema_id=stage, structured=structured)).payload

    orch = Orchestrator(CallbackBackend(respond), max_iterations=cap)
    state = orch.run_to_completion(orch.start(uniform_image(100)))
    assert state.stage is Stage.DONE
    assert state.outcome == "cap_reached"
    assert len(state.iterations) == cap, f"expected exactly {cap} iterations"
    report(f"loop bound (adversarial backend, N={cap})")


def test_heuristic_end_to_end_on_dark_image():
    img = uniform_image(64)  # pooled mean 64 < 96
    assert H.compute_histogram(img).pooled_mean < 96.0
    orch = Orchestrator(HeuristicBackend())
    state = orch.run_to_completion(orch.start(img))
    assert state.stage is Stage.DONE
    assert state.iterations[0].params.basic.exposure >= 0.8, \
        "first iteration must push exposure by at least +0.8"
    assert len(state.iterations) <= 5
    report(f"heuristic end-to-end (dark image, {len(state.iterations)} iterations, offline)")


def test_service_contract_with_sse_reconnect(tmp_path):
    config = AppConfig(backend="heuristic", store_root=str(tmp_path / "store"))
    client = TestClient(create_app(config))

    response = client.post(
        "/api/sessions",
        files={"image": ("in.png", io.BytesIO(png_bytes(uniform_image(128))), "image/png")},
    )
    assert response.status_code == 201
    session_id = response.json()["session_id"]
    done = client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
    assert done.status_code == 200 and done.json()["stage"] == "done"

    def read_events(headers=None):
        with client.stream("GET", f"/api/sessions/{session_id}/events",
                           headers=headers or {}) as stream:
            blocks = "".join(stream.iter_text()).strip().split("\n\n")
        events = []
        for block in blocks:
            data_line = next(l for l in block.splitlines() if l.startswith("data: "))
            events.append(json.loads(data_line[len("data: "):]))
        return events

    full = read_events()
    assert [e["seq"] for e in full] == list(range(1, len(full) + 1)), "no gaps from seq 1"
    assert full[-1]["type"] == "done"

    # forced disconnect: take the first half, then resume via Last-Event-ID
    cut = len(full) // 2
    resumed = read_events(headers={"Last-Event-ID": str(full[cut - 1]["seq"])})
    combined = [e["seq"] for e in full[:cut]] + [e["seq"] for e in resumed]
    assert combined == [e["seq"] for e in full], "reconnect must lose nothing and duplicate nothing"
    report("service contract (create/run/events + SSE reconnect)")
