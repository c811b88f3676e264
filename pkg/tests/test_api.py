"""Service API: REST endpoints and the WebSocket event stream."""

import pytest
from fastapi.testclient import TestClient

from mesochat.service.app import create_app
from mesochat.service.config import ServiceConfig


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(backend="mock", catalog_dir="catalog",
                           prompts_dir=str(tmp_path / "prompts"))
    app = create_app(config)
    with TestClient(app) as client:
        yield client


def new_session(client, seed=42):
    response = client.post("/sessions", json={"seed": seed})
    assert response.status_code == 200
    return response.json()["id"]


class TestRest:
    def test_create_session(self, client):
        response = client.post("/sessions", json={"seed": 7})
        body = response.json()
        assert body["seed"] == 7
        assert body["backend"] == "mock"

    def test_message_and_scene(self, client):
        sid = new_session(client)
        out = client.post(f"/sessions/{sid}/message", json={
            "text": "Populate the Au atom uniformly on a rectangle skeleton"}).json()
        assert out["ok"] is True
        assert out["created_rules"] == [1]
        client.post(f"/sessions/{sid}/apply-rule", json={"rule_id": 1})
        scene = client.get(f"/sessions/{sid}/scene").json()
        assert scene["version"] == 1
        assert len(scene["instances"]) == 100  # default elements
        assert "Au" in scene["ingredients"]
        assert scene["session"]["rules"][0]["type"] == "fill"

    def test_selection_flow(self, client):
        sid = new_session(client)
        out = client.post(f"/sessions/{sid}/message", json={
            "text": "Create the HDT layer 2 units above the rectangle skeleton"}).json()
        assert out["pending_selection"]["candidates"] == ["HDT_dithiol", "HDT_monothiol"]
        out = client.post(f"/sessions/{sid}/select", json={"candidate_index": 1}).json()
        assert out["ok"] is True
        scene = client.get(f"/sessions/{sid}/scene").json()
        assert scene["session"]["selected_ingredients"] == ["HDT_monothiol"]

    def test_revert(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/message", json={
            "text": "Populate the Au atom uniformly on a rectangle skeleton"})
        client.post(f"/sessions/{sid}/apply-rule", json={"rule_id": 1})
        out = client.post(f"/sessions/{sid}/revert-rule", json={"rule_id": 1}).json()
        assert out["ok"] is True
        scene = client.get(f"/sessions/{sid}/scene").json()
        assert scene["instances"] == []

    def test_automatic(self, client):
        sid = new_session(client)
        out = client.post(f"/sessions/{sid}/automatic", json={
            "description": "Generate a blood plasma model inside a box."}).json()
        assert out["ok"] is True
        assert len(out["steps"]) == 8
        scene = client.get(f"/sessions/{sid}/scene").json()
        assert len(scene["instances"]) > 500

    def test_feedback_endpoint(self, client):
        sid = new_session(client)
        out = client.post(f"/sessions/{sid}/message", json={
            "text": "Add lipid copies above the membrane"}).json()
        turn = out["turn_index"]
        rerun = client.post(f"/sessions/{sid}/feedback", json={
            "turn_index": turn, "corrected_output": "siblings"}).json()
        assert rerun["ok"] is True
        assert rerun["replaces_turn"] == turn

    def test_feedback_invalid_correction_is_400(self, client):
        sid = new_session(client)
        out = client.post(f"/sessions/{sid}/message", json={
            "text": "Add lipid copies above the membrane"}).json()
        response = client.post(f"/sessions/{sid}/feedback", json={
            "turn_index": out["turn_index"], "corrected_output": "not-a-thing at all"})
        assert response.status_code == 400

    def test_history(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/message", json={"text": "save the model"})
        turns = client.get(f"/sessions/{sid}/history").json()["turns"]
        assert turns[0]["user_text"] == "save the model"
        assert turns[0]["intent"] is not None

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/9999/scene").status_code == 404

    def test_catalog_endpoint(self, client):
        body = client.get("/catalog").json()
        names = {i["name"] for i in body["ingredients"]}
        assert {"Au", "SpyCatcher", "Heparin"} <= names
        assert {s["name"] for s in body["skeletons"]} >= {"box", "rectangle"}


class TestWebSocket:
    def test_event_stream(self, client):
        sid = new_session(client)
        with client.websocket_connect(f"/sessions/{sid}/events") as ws:
            client.post(f"/sessions/{sid}/message", json={
                "text": "Populate the Au atom uniformly on a rectangle skeleton"})
            event = ws.receive_json()
            assert event["type"] == "turn"
            client.post(f"/sessions/{sid}/apply-rule", json={"rule_id": 1})
            saw_delta = False
            for _ in range(3):
                event = ws.receive_json()
                if event["type"] == "scene-delta" and event["added"]:
                    saw_delta = True
                    break
            assert saw_delta
