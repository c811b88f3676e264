"""HTTP + WebSocket service over sessions.

Turn-level failures are part of the modeling conversation, so they come
back as 200 responses with ``ok: false`` outcomes; HTTP error codes are
reserved for protocol misuse (unknown session, malformed request).
Each session processes requests strictly serially under its own lock.
"""

from __future__ import annotations

import argparse
import asyncio
import queue
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..engine.scene import scene_to_dict
from ..translator import MockBackend, PromptStore, RemoteBackend
from ..translator.prompts import InvalidCorrection, UnknownOperation
from .catalog import Catalog, load_catalog
from .config import ServiceConfig
from .sessions import Session, SessionError


class CreateSessionRequest(BaseModel):
    seed: Optional[int] = None
    backend: Optional[str] = None


class MessageRequest(BaseModel):
    text: str


class SelectRequest(BaseModel):
    candidate_index: int


class RuleRequest(BaseModel):
    rule_id: int


class FeedbackRequest(BaseModel):
    turn_index: int
    corrected_output: str
    operation: Optional[str] = None


class AutomaticRequest(BaseModel):
    description: str


class SessionManager:
    def __init__(self, config: ServiceConfig, catalog: Catalog, store: PromptStore):
        self.config = config
        self.catalog = catalog
        self.store = store
        self.sessions: dict[int, Session] = {}
        self.locks: dict[int, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _backend(self, kind: Optional[str]):
        kind = kind or self.config.backend
        if kind == "mock":
            return MockBackend()
        if kind == "remote":
            return RemoteBackend(self.config.endpoint, self.config.model)
        raise HTTPException(400, f"unknown backend kind {kind!r}")

    def create(self, request: CreateSessionRequest) -> Session:
        seed = request.seed if request.seed is not None else self.config.default_seed
        session = Session(self.catalog, self.store, self._backend(request.backend),
                          seed=seed)
        with self._registry_lock:
            self.sessions[session.id] = session
            self.locks[session.id] = threading.Lock()
        return session

    def get(self, session_id: int) -> tuple[Session, threading.Lock]:
        with self._registry_lock:
            session = self.sessions.get(session_id)
            lock = self.locks.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session, lock


def snapshot(session: Session) -> dict:
    """Scene JSON augmented with the display data the viewport needs."""
    data = scene_to_dict(session.scene)
    data["ingredients"] = {
        name: {"bounding_radius": ing.bounding_radius, "color": list(ing.color),
               "pivot": [float(v) for v in ing.pivot],
               "chains": None if ing.chains is None
               else [c.tolist() for c in ing.chains]}
        for name, ing in session.catalog.ingredients.items()
        if name in {i.ingredient for i in session.scene.instances}
        or name in session.scene.catalog
    }
    data["session"] = {
        "id": session.id,
        "selected_ingredients": session.selected_ingredients,
        "selected_skeleton": session.selected_skeleton,
        "pending_selection": (session.pending_selection.to_dict()
                              if session.pending_selection else None),
        "rules": [{"id": r.id, "type": r.rule_type.value,
                   "description": r.description,
                   "applications": len(r.applied)} for r in session.scene.rules],
    }
    return data


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    catalog = load_catalog(config.catalog_dir)
    store = PromptStore.load(config.prompts_dir)
    manager = SessionManager(config, catalog, store)

    app = FastAPI(title="mesochat", version="0.1.0")
    app.state.manager = manager

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        session = manager.create(request)
        return {"id": session.id, "seed": session.scene.seed,
                "backend": session.backend.name}

    @app.post("/sessions/{session_id}/message")
    def post_message(session_id: int, request: MessageRequest):
        session, lock = manager.get(session_id)
        with lock:
            return session.handle_turn(request.text).to_dict()

    @app.post("/sessions/{session_id}/select")
    def post_select(session_id: int, request: SelectRequest):
        session, lock = manager.get(session_id)
        with lock:
            return session.resolve_selection(request.candidate_index).to_dict()

    @app.post("/sessions/{session_id}/apply-rule")
    def post_apply(session_id: int, request: RuleRequest):
        session, lock = manager.get(session_id)
        with lock:
            return session.apply_rule_by_id(request.rule_id).to_dict()

    @app.post("/sessions/{session_id}/revert-rule")
    def post_revert(session_id: int, request: RuleRequest):
        session, lock = manager.get(session_id)
        with lock:
            return session.revert_rule_by_id(request.rule_id).to_dict()

    @app.post("/sessions/{session_id}/feedback")
    def post_feedback(session_id: int, request: FeedbackRequest):
        session, lock = manager.get(session_id)
        with lock:
            try:
                outcome = session.submit_feedback(
                    request.turn_index, request.corrected_output, request.operation)
            except (InvalidCorrection, UnknownOperation, SessionError) as exc:
                raise HTTPException(400, str(exc))
            return outcome.to_dict()

    @app.post("/sessions/{session_id}/automatic")
    def post_automatic(session_id: int, request: AutomaticRequest):
        session, lock = manager.get(session_id)
        with lock:
            outcomes = session.run_automatic(request.description)
            return {"steps": [o.to_dict() for o in outcomes],
                    "ok": all(o.ok for o in outcomes)}

    @app.get("/sessions/{session_id}/scene")
    def get_scene(session_id: int):
        session, lock = manager.get(session_id)
        with lock:
            return snapshot(session)

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: int):
        session, lock = manager.get(session_id)
        with lock:
            return {
                "turns": [
                    {"kind": rec.kind, "user_text": rec.user_text,
                     "intent": rec.intent, "raw_output": rec.raw_output,
                     "outcome": rec.outcome.to_dict() if rec.outcome else None}
                    for rec in session.history
                ]
            }

    @app.get("/catalog")
    def get_catalog():
        return {
            "ingredients": [ing.to_dict() for ing in catalog.ingredients.values()],
            "skeletons": [sk.to_dict() for sk in catalog.skeletons.values()],
        }

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: int):
        try:
            session, _lock = manager.get(session_id)
        except HTTPException:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        events_queue: queue.Queue = queue.Queue()
        listener = events_queue.put
        session.listeners.append(listener)
        try:
            # Drain pending events, then poll the socket so a client
            # disconnect always ends the loop promptly.
            while True:
                try:
                    while True:
                        await websocket.send_json(events_queue.get_nowait())
                except queue.Empty:
                    pass
                try:
                    message = await asyncio.wait_for(websocket.receive(), timeout=0.1)
                except asyncio.TimeoutError:
                    continue
                if message["type"] == "websocket.disconnect":
                    break
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if listener in session.listeners:
                session.listeners.remove(listener)

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True),
                  name="ui")

    return app


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="mesochat-serve",
                                     description="Run the modeling service")
    parser.add_argument("--config", help="service config JSON")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--backend", choices=["mock", "remote"])
    parser.add_argument("--catalog", help="catalog directory")
    parser.add_argument("--prompts", help="prompt store directory")
    parser.add_argument("--static", help="frontend dist directory to serve at /ui")
    args = parser.parse_args(argv)

    config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
    if args.backend:
        config.backend = args.backend
    if args.catalog:
        config.catalog_dir = args.catalog
    if args.prompts:
        config.prompts_dir = args.prompts
    if args.static:
        config.static_dir = args.static

    import uvicorn

    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
