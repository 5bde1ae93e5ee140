"""Interactive session: predict, label, persistence, the MGL loop invariants."""

import pytest

from conftest import fixture_path
from mgl.bk import KnowledgeEdge, Snapshot, load_snapshot
from mgl.engine import entails
from mgl.logic import render_clause
from mgl.session import (
    SessionError,
    SessionState,
    example_atom,
    label,
    load_session,
    normalize_category,
    predict,
    save_session,
    submit_label,
    submit_task,
)

CHAIN_RULE = "category(A,B) :- contains(A,C), related_to(C,B)."


def edge(h, t, w=2.0):
    return KnowledgeEdge(h, "related_to", t, w)


def paper_state() -> SessionState:
    return SessionState(snapshot=load_snapshot(fixture_path("paper_bk.facts")))


# ---------------------------------------------------------------------------
# Category normalization


def test_normalize_category():
    assert normalize_category("Family") == "family"
    assert normalize_category("  Phone Call ") == "phone_call"
    with pytest.raises(SessionError):
        normalize_category("!!!")
    with pytest.raises(SessionError):
        normalize_category("9lives")


# ---------------------------------------------------------------------------
# Predict / label loop


def test_fresh_session_predicts_nothing():
    pred = predict(paper_state(), "call mother")
    assert pred.categories == ()


def test_label_learns_chain_rule_one_shot():
    state = paper_state()
    label(state, "swim lesson", "sport")  # the stored negative-to-be
    outcome = label(state, "call mother", "family")
    assert not outcome.already_covered
    assert outcome.failure_reason is None
    assert outcome.new_hypothesis.render() == CHAIN_RULE


def test_predict_after_label_matches():
    state = paper_state()
    label(state, "swim lesson", "sport")
    label(state, "call mother", "family")
    pred = predict(state, "call mother")
    assert "family" in pred.categories
    assert CHAIN_RULE in pred.matched_rules


def test_predict_empty_tokens_warns():
    pred = predict(paper_state(), "the of a")
    assert pred.categories == ()
    assert pred.warning is not None


def test_predict_is_pure():
    state = paper_state()
    label(state, "call mother", "family")
    before = (list(state.examples), dict(state.hypotheses), list(state.history))
    predict(state, "visit mother")
    assert (list(state.examples), dict(state.hypotheses), list(state.history)) == before


def test_label_already_covered():
    state = paper_state()
    label(state, "call mother", "family")
    outcome = label(state, "visit mother", "family")  # mother edge already covers it
    assert outcome.already_covered
    assert outcome.new_hypothesis is None


def test_label_failure_preserves_prior_hypothesis():
    state = SessionState(snapshot=Snapshot())  # no edges: nothing is learnable
    outcome = label(state, "call mother", "family")
    assert outcome.new_hypothesis is None
    assert outcome.failure_reason is not None
    assert state.hypotheses == {}
    assert len(state.examples) == 1  # the example is still recorded


def test_label_rejects_empty_text():
    with pytest.raises(SessionError):
        label(paper_state(), "the of", "family")


def test_coverage_growth_and_non_regression():
    state = paper_state()
    texts = [("call mother", "family"), ("swim lesson", "sport"), ("plan trip", "family")]
    for text, cat in texts:
        label(state, text, cat)
        assert cat in predict(state, text).categories
    # every earlier positive is still covered by its category's current rule
    for text, cat in texts:
        assert cat in predict(state, text).categories


def test_other_category_negatives_not_covered():
    state = paper_state()
    label(state, "swim lesson", "sport")
    label(state, "call mother", "family")
    h = state.hypotheses["family"]
    from mgl.session import _session_store

    store = _session_store(state)
    for ex in state.examples:
        if ex.category != "family":
            goal = example_atom(ex.words, "family")
            assert not entails(h.clauses, store, goal, state.engine.depth_limit)


# ---------------------------------------------------------------------------
# History via the shared submit entry points


def test_submit_task_appends_history():
    state = paper_state()
    submit_task(state, "call mother", now_ms=123)
    assert len(state.history) == 1
    rec = state.history[0]
    assert rec.kind == "predict" and rec.text == "call mother" and rec.timestamp == 123


def test_submit_label_records_learned_rules():
    state = paper_state()
    outcome = submit_label(state, "call mother", "family", now_ms=456)
    assert outcome.new_hypothesis is not None
    rec = state.history[-1]
    assert rec.kind == "label" and rec.label == "family"
    assert CHAIN_RULE in rec.learned_rules


def test_relabel_conflict_is_noted_not_retracted():
    state = paper_state()
    submit_label(state, "call mother", "family", now_ms=1)
    submit_label(state, "call mother", "work", now_ms=2)
    assert len(state.examples) == 2  # both labels kept
    assert "re-label" in state.history[-1].note


# ---------------------------------------------------------------------------
# Persistence


def trained_state() -> SessionState:
    state = paper_state()
    submit_task(state, "call mother", now_ms=1)
    submit_label(state, "call mother", "family", now_ms=2)
    submit_label(state, "swim lesson", "sport", now_ms=3)
    return state


def test_session_roundtrip(tmp_path):
    state = trained_state()
    path = str(tmp_path / "session.mgl")
    save_session(state, path)
    loaded = load_session(path, snapshot=state.snapshot)
    assert [ (e.id, e.text, e.words, e.category, e.timestamp) for e in loaded.examples ] == [
        (e.id, e.text, e.words, e.category, e.timestamp) for e in state.examples
    ]
    assert loaded.history == state.history
    assert set(loaded.hypotheses) == set(state.hypotheses)
    for cat in state.hypotheses:
        assert loaded.hypotheses[cat].render() == state.hypotheses[cat].render()
        assert loaded.hypotheses[cat].metarule_names == state.hypotheses[cat].metarule_names


def test_loaded_session_predicts_identically(tmp_path):
    state = trained_state()
    path = str(tmp_path / "session.mgl")
    save_session(state, path)
    loaded = load_session(path, snapshot=state.snapshot)
    for text in ("call mother", "visit mother", "swim lesson", "buy milk"):
        assert predict(loaded, text) == predict(state, text)


def test_session_save_is_deterministic(tmp_path):
    state = trained_state()
    p1, p2 = str(tmp_path / "a.mgl"), str(tmp_path / "b.mgl")
    save_session(state, p1)
    save_session(state, p2)
    assert open(p1).read() == open(p2).read()


def test_session_load_missing_file():
    with pytest.raises(SessionError):
        load_session("/nonexistent/session.mgl")


def test_session_checksum_mismatch(tmp_path):
    state = trained_state()
    path = str(tmp_path / "session.mgl")
    save_session(state, path)
    text = open(path).read().replace("call mother", "hack mother")
    with open(path, "w") as f:
        f.write(text)
    with pytest.raises(SessionError, match="checksum"):
        load_session(path, snapshot=state.snapshot)


def test_session_header_mismatch(tmp_path):
    path = tmp_path / "session.mgl"
    path.write_text("#mgl-session v9\n#sha256: 0\n")
    with pytest.raises(SessionError, match="header"):
        load_session(str(path))
