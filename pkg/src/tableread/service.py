"""REST service: upload, sessions, stepping, SSE feed, marks, export.

Single-operator tool: sessions live in memory behind per-session locks and
every mutation is checkpointed into the document store.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .config import AppConfig, build_provider
from .errors import (
    ClassificationError,
    EndOfScreenplay,
    InvalidModeConfig,
    ProviderError,
    SceneIncomplete,
    TableReadError,
    UnknownCharacter,
    UnknownTarget,
)
from .orchestrator import (
    Session,
    SessionConfig,
    create_session,
    export_marks,
    export_session,
    finish_scene,
    mark_value,
    step,
)
from .screenplay import ParsedScreenplay, RawScreenplay, parse_screenplay
from .serialize import canonical_json
from .storage import DocumentStore


class ScreenplayUpload(BaseModel):
    title: str
    body: str
    bios: str | None = None
    outline: str | None = None


class SessionCreate(BaseModel):
    screenplay_id: str
    mode: str
    activated: list[str] = []


class MarkCreate(BaseModel):
    target_id: str


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


_STATUS_BY_ERROR = (
    (EndOfScreenplay, 410, "end_of_screenplay"),
    (SceneIncomplete, 409, "scene_incomplete"),
    (InvalidModeConfig, 409, "invalid_config"),
    (UnknownCharacter, 409, "unknown_character"),
    (UnknownTarget, 404, "unknown_target"),
    (ClassificationError, 422, "parse_error"),
    (ProviderError, 502, "provider_error"),
)


def create_app(config: AppConfig | None = None, provider=None, clock=None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="tableread", version="0.1.0")
    app.state.config = config
    app.state.store = DocumentStore(config.store_root)
    app.state.provider = provider if provider is not None else build_provider(config)
    app.state.sessions: dict[str, Session] = {}
    app.state.locks: dict[str, threading.Lock] = {}
    app.state.clock = clock

    store: DocumentStore = app.state.store

    @app.exception_handler(TableReadError)
    async def handle_engine_error(request: Request, exc: TableReadError):
        for err_type, status, code in _STATUS_BY_ERROR:
            if isinstance(exc, err_type):
                return _error(status, code, str(exc))
        return _error(500, "internal_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc))

    def _get_session(session_id: str) -> Session:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise UnknownTarget(f"no session '{session_id}'")
        return session

    def _lock(session_id: str) -> threading.Lock:
        return app.state.locks.setdefault(session_id, threading.Lock())

    def _checkpoint(session: Session) -> None:
        store.put("session", session.id, export_session(session))
        store.put("marks", session.id, export_marks(session))
        _append_verdicts(session)

    verdict_log_cursor: dict[str, int] = {}

    def _append_verdicts(session: Session) -> None:
        # per-session JSONL audit trail; verdicts only ever accumulate
        written = verdict_log_cursor.get(session.id, 0)
        new = session.verdicts[written:]
        if not new:
            return
        path = store.root / "verdicts" / f"{session.id}.jsonl"
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            for verdict in new:
                fh.write(canonical_json(verdict.to_dict()) + "\n")
        verdict_log_cursor[session.id] = len(session.verdicts)

    @app.post("/screenplays")
    def upload_screenplay(body: ScreenplayUpload):
        if not body.body.strip():
            return _error(422, "empty_body", "screenplay body is empty")
        raw = RawScreenplay(
            title=body.title, body=body.body, bios=body.bios, outline=body.outline
        )
        parsed = parse_screenplay(raw, app.state.provider)
        doc_id = uuid.uuid4().hex[:12]
        store.put("screenplay", doc_id, parsed.to_dict())
        return {"id": doc_id}

    @app.get("/screenplays/{doc_id}")
    def get_screenplay(doc_id: str):
        if not store.exists("screenplay", doc_id):
            return _error(404, "not_found", f"no screenplay '{doc_id}'")
        return store.get("screenplay", doc_id)

    @app.post("/sessions")
    def new_session(body: SessionCreate):
        if not store.exists("screenplay", body.screenplay_id):
            return _error(404, "not_found", f"no screenplay '{body.screenplay_id}'")
        parsed = ParsedScreenplay.from_dict(store.get("screenplay", body.screenplay_id))
        kwargs = {"clock": app.state.clock} if app.state.clock else {}
        session = create_session(
            parsed,
            body.mode,
            body.activated,
            SessionConfig(
                embedding_dimension=app.state.provider.config.embedding_dimension,
                memory_dir=store.root / "memory",
            ),
            session_id="sess-" + uuid.uuid4().hex[:12],
            **kwargs,
        )
        app.state.sessions[session.id] = session
        _checkpoint(session)
        return {"id": session.id}

    @app.post("/sessions/{session_id}/step")
    def session_step(session_id: str):
        session = _get_session(session_id)
        with _lock(session_id):
            result = step(session, app.state.provider)
            _checkpoint(session)
        return result.to_dict()

    @app.post("/sessions/{session_id}/finish-scene")
    def session_finish_scene(session_id: str):
        session = _get_session(session_id)
        with _lock(session_id):
            items = finish_scene(session, app.state.provider)
            _checkpoint(session)
        return [item.to_dict() for item in items]

    @app.post("/sessions/{session_id}/marks")
    def session_mark(session_id: str, body: MarkCreate):
        session = _get_session(session_id)
        with _lock(session_id):
            mark = mark_value(session, body.target_id)
            _checkpoint(session)
        return mark.to_dict()

    @app.get("/sessions/{session_id}/marks")
    def session_marks(session_id: str):
        session = _get_session(session_id)
        return export_marks(session)

    @app.get("/sessions/{session_id}/export")
    def session_export(session_id: str):
        session = _get_session(session_id)
        return export_session(session)

    @app.get("/sessions/{session_id}/events")
    def session_events(session_id: str, follow: bool = True):
        session = _get_session(session_id)

        def stream() -> Iterator[str]:
            cursor = 0
            idle = 0.0
            while True:
                events = session.events
                while cursor < len(events):
                    event = events[cursor]
                    payload = canonical_json(event["data"])
                    yield f"event: {event['event']}\ndata: {payload}\n\n"
                    cursor += 1
                    idle = 0.0
                if not follow:
                    return
                time.sleep(0.05)
                idle += 0.05
                if idle >= 15.0:
                    yield ": keepalive\n\n"
                    idle = 0.0

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
