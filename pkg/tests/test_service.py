"""HTTP surface: one session per process, JSON contracts, safe persistence."""

import pytest
from fastapi.testclient import TestClient

from conftest import fixture_path
from mgl.bk import load_snapshot
from mgl.service import create_app
from mgl.session import SessionState, save_session, submit_label, submit_task

CHAIN_RULE = "category(A,B) :- contains(A,C), related_to(C,B)."

PAPER_SNAPSHOT = fixture_path("paper_bk.facts")


def make_client(**kwargs) -> TestClient:
    kwargs.setdefault("snapshot_path", PAPER_SNAPSHOT)
    return TestClient(create_app(**kwargs))


@pytest.fixture
def client():
    return make_client()


def test_fresh_session_has_no_rules(client):
    resp = client.get("/api/rules")
    assert resp.status_code == 200
    assert resp.json() == {"ok": True, "rules": {}}


def test_label_then_predict_loop(client):
    resp = client.post("/api/labels", json={"text": "call mother", "category": "family"})
    body = resp.json()
    assert resp.status_code == 200
    assert body["ok"] and not body["already_covered"]
    assert body["new_hypothesis"] == [CHAIN_RULE]
    assert body["failure_reason"] is None

    resp = client.post("/api/tasks", json={"text": "visit mother"})
    pred = resp.json()["prediction"]
    assert "family" in pred["categories"]
    assert CHAIN_RULE in pred["matched_rules"]

    resp = client.get("/api/rules")
    assert resp.json()["rules"] == {"family": [CHAIN_RULE]}


def test_task_empty_text_warns_but_succeeds(client):
    resp = client.post("/api/tasks", json={"text": "the of a"})
    body = resp.json()
    assert resp.status_code == 200 and body["ok"]
    assert body["prediction"]["categories"] == []
    assert body["prediction"]["warning"]


def test_invalid_payloads_are_400(client):
    for route, payload in (
        ("/api/tasks", {}),
        ("/api/tasks", {"text": 7}),
        ("/api/labels", {"text": "x"}),
        ("/api/labels", {"text": "call mother", "category": 3}),
    ):
        resp = client.post(route, json=payload)
        assert resp.status_code == 400
        body = resp.json()
        assert body["ok"] is False and body["error"]["code"] == "invalid_input"


def test_label_invalid_category_is_400(client):
    resp = client.post("/api/labels", json={"text": "call mother", "category": "!!!"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "invalid_input"


def test_label_failure_is_reported_not_an_error(client):
    resp = client.post("/api/labels", json={"text": "buy zeppelin", "category": "family"})
    body = resp.json()
    assert resp.status_code == 200 and body["ok"]
    assert body["new_hypothesis"] is None
    assert body["failure_reason"]


def test_history_records_both_kinds(client):
    client.post("/api/tasks", json={"text": "call mother"})
    client.post("/api/labels", json={"text": "call mother", "category": "family"})
    records = client.get("/api/history").json()["records"]
    assert [r["kind"] for r in records] == ["predict", "label"]
    assert CHAIN_RULE in records[1]["learned_rules"]


def test_delete_session_resets_state(client):
    client.post("/api/labels", json={"text": "call mother", "category": "family"})
    assert client.delete("/api/session").json() == {"ok": True}
    assert client.get("/api/rules").json()["rules"] == {}
    assert client.get("/api/history").json()["records"] == []


def test_persistence_failure_is_500_and_state_unchanged(tmp_path):
    client = make_client(session_file=str(tmp_path / "missing-dir" / "session.mgl"))
    resp = client.post("/api/labels", json={"text": "call mother", "category": "family"})
    assert resp.status_code == 500
    assert resp.json()["error"]["code"] == "persistence"
    # the failed mutation must not leak into the served state
    assert client.get("/api/rules").json()["rules"] == {}
    assert client.get("/api/history").json()["records"] == []


def test_session_file_roundtrip(tmp_path):
    path = str(tmp_path / "session.mgl")
    client = make_client(session_file=path, clock=lambda: 1000)
    client.post("/api/labels", json={"text": "call mother", "category": "family"})
    reopened = make_client(session_file=path)
    assert reopened.get("/api/rules").json()["rules"] == {"family": [CHAIN_RULE]}


def test_http_and_direct_calls_write_identical_sessions(tmp_path):
    http_path = str(tmp_path / "http.mgl")
    client = make_client(session_file=http_path, clock=lambda: 42)
    client.post("/api/tasks", json={"text": "call mother"})
    client.post("/api/labels", json={"text": "call mother", "category": "family"})

    state = SessionState(
        snapshot=load_snapshot(PAPER_SNAPSHOT), snapshot_path=PAPER_SNAPSHOT
    )
    submit_task(state, "call mother", now_ms=42)
    submit_label(state, "call mother", "family", now_ms=42)
    direct_path = str(tmp_path / "direct.mgl")
    save_session(state, direct_path)

    assert open(http_path).read() == open(direct_path).read()


def test_cors_headers_present(client):
    resp = client.get("/api/rules")
    assert resp.headers["Access-Control-Allow-Origin"] == "*"


def test_custom_allow_origin():
    client = make_client(allow_origin="http://localhost:5173")
    resp = client.get("/api/rules")
    assert resp.headers["Access-Control-Allow-Origin"] == "http://localhost:5173"


def test_static_dir_serves_ui(tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>mgl</title>")
    client = make_client(static_dir=str(tmp_path))
    resp = client.get("/")
    assert resp.status_code == 200
    assert "mgl" in resp.text
    # API routes still take precedence over the static mount
    assert client.get("/api/rules").json()["ok"]
