import io
import json

import pytest
from fastapi.testclient import TestClient

from retouch import params as P
from retouch.agent import Stage
from retouch.config import AppConfig
from retouch.fixtures import demo_image_bytes, demo_transcript_path
from retouch.image import decode_image, png_bytes
from retouch.service import create_app
from retouch.storage import SessionStore, SnapshotCorruptError

from tests.conftest import uniform_image


@pytest.fixture
def client(tmp_path):
    config = AppConfig(backend="heuristic", store_root=str(tmp_path / "store"))
    return TestClient(create_app(config))


def upload(client, image_bytes, instruction=None):
    data = {}
    if instruction is not None:
        data["instruction"] = instruction
    response = client.post(
        "/api/sessions",
        files={"image": ("input.png", io.BytesIO(image_bytes), "image/png")},
        data=data,
    )
    return response


def gray_png(value=128) -> bytes:
    return png_bytes(uniform_image(value))


def parse_sse(text):
    events = []
    for block in text.strip().split("\n\n"):
        event = {}
        for line in block.splitlines():
            key, _, value = line.partition(": ")
            event.setdefault(key, value)
        if "data" in event:
            event["data"] = json.loads(event["data"])
        events.append(event)
    return events


class TestLifecycle:
    def test_create_returns_initial_state(self, client):
        response = upload(client, gray_png())
        assert response.status_code == 201
        doc = response.json()
        assert doc["stage"] == "content_description"
        assert doc["session_id"]

    def test_undecodable_upload_rejected(self, client):
        response = upload(client, b"definitely not a png")
        assert response.status_code == 422

    def test_oversized_upload_rejected(self, client, monkeypatch):
        import numpy as np

        from retouch import service as service_module
        from retouch.image import ImageBuffer

        monkeypatch.setattr(service_module, "MAX_UPLOAD_BYTES", 1024)
        rng = np.random.default_rng(9)
        noisy = ImageBuffer(pixels=rng.integers(0, 256, size=(32, 48, 3), dtype=np.uint8))
        response = upload(client, png_bytes(noisy))  # incompressible, several KB
        assert response.status_code == 422
        assert "upload limit" in response.json()["detail"]

    def test_unknown_session_404(self, client):
        assert client.get("/api/sessions/nope").status_code == 404
        assert client.post("/api/sessions/nope/run", json={"mode": "auto"}).status_code == 404

    def test_create_run_auto_completes_and_serves_artifacts(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        response = client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        assert response.status_code == 200
        doc = response.json()
        assert doc["stage"] == "done"
        assert doc["outcome"] == "satisfied"
        assert len(doc["iterations"]) == 1

        image = client.get(f"/api/sessions/{session_id}/iterations/1/image")
        assert image.status_code == 200
        assert image.headers["content-type"] == "image/png"
        rendered = decode_image(image.content)
        assert rendered.digest() == doc["iterations"][0]["image_digest"]

        plot = client.get(f"/api/sessions/{session_id}/iterations/1/histogram")
        assert plot.status_code == 200
        assert decode_image(plot.content).width == 768

    def test_missing_iteration_404(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        assert client.get(f"/api/sessions/{session_id}/iterations/1/image").status_code == 404

    def test_source_image_served(self, client):
        original = gray_png()
        session_id = upload(client, original).json()["session_id"]
        response = client.get(f"/api/sessions/{session_id}/source")
        assert response.status_code == 200
        assert decode_image(response.content) == decode_image(original)

    def test_list_sessions(self, client):
        a = upload(client, gray_png()).json()["session_id"]
        b = upload(client, gray_png(90)).json()["session_id"]
        listed = {s["session_id"] for s in client.get("/api/sessions").json()}
        assert {a, b} <= listed


class TestSteering:
    def test_direction_wrong_stage_409(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        response = client.post(f"/api/sessions/{session_id}/direction", json={"approach_index": 0})
        assert response.status_code == 409

    def test_step_mode_pauses_at_direction_gate(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        stages = []
        for _ in range(2):
            doc = client.post(f"/api/sessions/{session_id}/run", json={"mode": "step"}).json()
            stages.append(doc["stage"])
        assert stages == ["strategy_proposal", "await_user_direction"]
        blocked = client.post(f"/api/sessions/{session_id}/run", json={"mode": "step"})
        assert blocked.status_code == 409

        chosen = client.post(f"/api/sessions/{session_id}/direction", json={"approach_index": 2})
        assert chosen.status_code == 200
        assert chosen.json()["chosen_approach"] == 2
        finished = client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        assert finished.json()["stage"] == "done"

    def test_direction_needs_payload(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        response = client.post(f"/api/sessions/{session_id}/direction", json={})
        assert response.status_code == 422

    def test_bad_run_mode_422(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        assert client.post(f"/api/sessions/{session_id}/run", json={"mode": "sprint"}).status_code == 422

    def test_reference_image_before_plan(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        response = client.post(
            f"/api/sessions/{session_id}/reference",
            files={"image": ("ref.png", io.BytesIO(gray_png(30)), "image/png")},
        )
        assert response.status_code == 200
        assert "dark" in response.json()["directive"]

    def test_reference_with_params_table(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        params = P.to_json(P.RetouchParams(basic=P.BasicAdjustments(highlights=-60, shadows=50)))
        response = client.post(
            f"/api/sessions/{session_id}/reference",
            files={"image": ("ref.png", io.BytesIO(gray_png(30)), "image/png")},
            data={"params": params},
        )
        assert response.status_code == 200
        assert "highlights -60" in response.json()["directive"]

    def test_reference_after_plan_409(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        response = client.post(
            f"/api/sessions/{session_id}/reference",
            files={"image": ("ref.png", io.BytesIO(gray_png(30)), "image/png")},
        )
        assert response.status_code == 409


class TestEvents:
    def test_event_stream_matches_log_order(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        with client.stream("GET", f"/api/sessions/{session_id}/events") as response:
            assert response.status_code == 200
            body = "".join(response.iter_text())
        events = parse_sse(body)
        seqs = [e["data"]["seq"] for e in events]
        assert seqs == sorted(seqs)
        assert seqs[0] == 1
        types = [e["data"]["type"] for e in events]
        assert types[-1] == "done"
        assert "verdict" in types and "params_proposed" in types

    def test_reconnect_with_last_event_id_no_gaps_or_dupes(self, client):
        session_id = upload(client, gray_png()).json()["session_id"]
        client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        with client.stream("GET", f"/api/sessions/{session_id}/events") as response:
            full = parse_sse("".join(response.iter_text()))
        cut = len(full) // 2
        first_half = full[:cut]
        last_id = first_half[-1]["id"]
        with client.stream("GET", f"/api/sessions/{session_id}/events",
                           headers={"Last-Event-ID": last_id}) as response:
            second_half = parse_sse("".join(response.iter_text()))
        combined = [e["data"]["seq"] for e in first_half + second_half]
        assert combined == [e["data"]["seq"] for e in full]

    def test_replay_backed_session_emits_recorded_verdicts(self, tmp_path):
        config = AppConfig(
            backend="replay",
            store_root=str(tmp_path / "store"),
            transcript_path=demo_transcript_path("dusk_tree"),
        )
        client = TestClient(create_app(config))
        session_id = upload(client, demo_image_bytes("dusk_tree")).json()["session_id"]
        done = client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        assert done.json()["stage"] == "done"
        with client.stream("GET", f"/api/sessions/{session_id}/events") as response:
            events = parse_sse("".join(response.iter_text()))
        verdicts = [e["data"]["satisfactory"] for e in events if e["data"]["type"] == "verdict"]
        assert verdicts == [False, False, True]


class TestPersistence:
    def test_restore_round_trip_across_app_instances(self, tmp_path):
        store_root = str(tmp_path / "store")
        config = AppConfig(backend="heuristic", store_root=store_root)
        client = TestClient(create_app(config))
        session_id = upload(client, gray_png()).json()["session_id"]
        done = client.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"}).json()

        fresh = TestClient(create_app(AppConfig(backend="heuristic", store_root=store_root)))
        restored = fresh.get(f"/api/sessions/{session_id}").json()
        assert restored == done
        image = fresh.get(f"/api/sessions/{session_id}/iterations/1/image")
        assert image.status_code == 200

    def test_restore_mid_session_resumes_at_stage_entry(self, tmp_path):
        store_root = str(tmp_path / "store")
        client = TestClient(create_app(AppConfig(backend="heuristic", store_root=store_root)))
        session_id = upload(client, gray_png(60)).json()["session_id"]
        for _ in range(2):
            client.post(f"/api/sessions/{session_id}/run", json={"mode": "step"})
        client.post(f"/api/sessions/{session_id}/direction", json={"approach_index": 0})
        for _ in range(3):  # final_plan, tone_analysis, param_generation
            client.post(f"/api/sessions/{session_id}/run", json={"mode": "step"})
        paused = client.get(f"/api/sessions/{session_id}").json()
        assert paused["stage"] == "render"

        fresh = TestClient(create_app(AppConfig(backend="heuristic", store_root=store_root)))
        restored = fresh.get(f"/api/sessions/{session_id}").json()
        assert restored["stage"] == "render"
        assert restored["working"]["params"] is not None
        finished = fresh.post(f"/api/sessions/{session_id}/run", json={"mode": "auto"})
        assert finished.json()["stage"] == "done"

    def test_corrupt_snapshot_reported(self, tmp_path):
        store_root = tmp_path / "store"
        client = TestClient(create_app(AppConfig(backend="heuristic", store_root=str(store_root))))
        session_id = upload(client, gray_png()).json()["session_id"]
        snapshot = store_root / session_id / "session.json"
        snapshot.write_text("{ this is not json")
        fresh = TestClient(create_app(AppConfig(backend="heuristic", store_root=str(store_root))))
        response = fresh.get(f"/api/sessions/{session_id}")
        assert response.status_code == 500
        assert "unrecoverable" in response.json()["detail"]

    def test_store_restore_equality_direct(self, tmp_path):
        from retouch.agent import Orchestrator
        from retouch.gateway import HeuristicBackend

        store = SessionStore(tmp_path / "direct")
        orch = Orchestrator(HeuristicBackend())
        state = orch.start(uniform_image(70))
        store.create(state)
        for event in state.events:
            store.append_event(state, event)
        orch.event_sink = lambda s, e: store.append_event(s, e)
        orch.run_to_completion(state)
        store.persist(state)

        restored = store.restore(state.session_id)
        assert restored.to_dict() == state.to_dict()
        assert restored.events == state.events
        with pytest.raises(SnapshotCorruptError):
            store.restore("missing-session")
