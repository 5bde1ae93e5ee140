"""HTTP+JSON surface for the interactive session, consumed by the companion UI.

Single session per process. Mutating requests are serialized; each one is
applied to a copy of the in-memory state and persisted atomically before the
copy replaces the live state, so a persistence failure leaves both the file
and the served state untouched.
"""

from __future__ import annotations

import copy
import os
import threading
import time
from dataclasses import asdict
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .bk import Snapshot, load_snapshot
from .logic import LogicError
from .session import (
    SessionState,
    load_session,
    save_session,
    submit_label,
    submit_task,
)

Clock = Callable[[], int]


def _now_ms() -> int:
    return int(time.time() * 1000)


def _fail(code: str, message: str, status: int = 400) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"ok": False, "error": {"code": code, "message": message}},
    )


def create_app(
    session_file: Optional[str] = None,
    snapshot_path: Optional[str] = None,
    allow_origin: str = "*",
    clock: Optional[Clock] = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    clock = clock or _now_ms
    snapshot = load_snapshot(snapshot_path) if snapshot_path else Snapshot()
    if session_file and os.path.exists(session_file):
        state = load_session(session_file, snapshot=snapshot if snapshot_path else None)
    else:
        state = SessionState(snapshot=snapshot, snapshot_path=snapshot_path)

    app = FastAPI(title="mgl")
    app.state.session = state
    lock = threading.Lock()

    @app.middleware("http")
    async def cors(request: Request, call_next):
        response = await call_next(request)
        response.headers["Access-Control-Allow-Origin"] = allow_origin
        response.headers["Access-Control-Allow-Methods"] = "GET, POST, DELETE, OPTIONS"
        response.headers["Access-Control-Allow-Headers"] = "Content-Type"
        return response

    def mutate(fn):
        """Run fn on a copy of the state; persist, then swap on success."""
        with lock:
            working = copy.deepcopy(app.state.session)
            result = fn(working)
            if session_file:
                save_session(working, session_file)
            app.state.session = working
            return result

    @app.post("/api/tasks")
    async def post_task(payload: dict):
        text = payload.get("text")
        if not isinstance(text, str):
            return _fail("invalid_input", "'text' must be a string")
        try:
            pred = mutate(lambda s: submit_task(s, text, clock()))
        except OSError as exc:
            return _fail("persistence", str(exc), status=500)
        return {
            "ok": True,
            "prediction": {
                "categories": list(pred.categories),
                "matched_rules": list(pred.matched_rules),
                "warning": pred.warning,
            },
        }

    @app.post("/api/labels")
    async def post_label(payload: dict):
        text = payload.get("text")
        category = payload.get("category")
        if not isinstance(text, str) or not isinstance(category, str):
            return _fail("invalid_input", "'text' and 'category' must be strings")
        try:
            outcome = mutate(lambda s: submit_label(s, text, category, clock()))
        except LogicError as exc:
            return _fail("invalid_input", str(exc))
        except OSError as exc:
            return _fail("persistence", str(exc), status=500)
        return {
            "ok": True,
            "already_covered": outcome.already_covered,
            "new_hypothesis": (
                outcome.new_hypothesis.render().splitlines()
                if outcome.new_hypothesis
                else None
            ),
            "failure_reason": outcome.failure_reason,
        }

    @app.get("/api/rules")
    async def get_rules():
        state: SessionState = app.state.session
        return {
            "ok": True,
            "rules": {
                cat: h.render().splitlines() for cat, h in sorted(state.hypotheses.items())
            },
        }

    @app.get("/api/history")
    async def get_history():
        state: SessionState = app.state.session
        return {"ok": True, "records": [asdict(r) for r in state.history]}

    @app.delete("/api/session")
    async def reset_session():
        def do_reset(s: SessionState):
            s.examples.clear()
            s.hypotheses.clear()
            s.history.clear()

        try:
            mutate(do_reset)
        except OSError as exc:
            return _fail("persistence", str(exc), status=500)
        return {"ok": True}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
