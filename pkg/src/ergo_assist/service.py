"""HTTP/WebSocket front for engine sessions.

One engine session per session_id, guarded by a per-session lock so events
apply in arrival order (the engine is single-writer).  Sessions persist as
append-only JSON Lines files: a header line with the scene and task, then
one line per log entry, which is exactly what the CLI replays.

Robot script items complete automatically: a timer injects the simulated
Tick and RobotActionDone after a configurable wall delay (zero in tests,
the action duration in interactive use).
"""

from __future__ import annotations

import asyncio
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import engine as eng
from .arrangement import NoFeasibleArrangement
from .config import DEFAULT_CONFIG, PlannerConfig
from .planner import make_plan, plan_to_dict
from .scene import SceneError, Scene, load_scene, serialize_scene
from .tasks import get_task

DEFAULT_DATA_DIR = "ergo-assist-sessions"


def resolve_data_dir(data_dir: str | os.PathLike | None) -> Path:
    if data_dir is None:
        data_dir = os.environ.get("ERGO_ASSIST_DATA_DIR", DEFAULT_DATA_DIR)
    path = Path(data_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


@dataclass
class Session:
    session_id: str
    state: eng.EngineState
    created_at: float
    path: Path
    lock: threading.Lock = field(default_factory=threading.Lock)
    subscribers: list[tuple[asyncio.Queue, asyncio.AbstractEventLoop]] = field(default_factory=list)
    auto_cursor_scheduled: int = -1


def _write_header(session: Session, task_name: str) -> None:
    header = {
        "session_id": session.session_id,
        "created_at": session.created_at,
        "task": task_name,
        "scene": serialize_scene(session.state.scene),
    }
    with session.path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")


def _append_entries(session: Session, entries: tuple[eng.LogEntry, ...]) -> None:
    if not entries:
        return
    with session.path.open("a", encoding="utf-8") as fh:
        fh.write(eng.log_to_jsonl(entries))


def load_session_record(path: Path) -> tuple[str, Scene, str, tuple[eng.LogEntry, ...]]:
    """Read one persisted session file: (session_id, scene, task name, log)."""
    with path.open("r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        entries = eng.log_from_jsonl(fh.read())
    scene = load_scene(header["scene"])
    return header["session_id"], scene, header["task"], entries


def create_app(
    data_dir: str | os.PathLike | None = None,
    fixtures_dir: str | os.PathLike | None = None,
    config: PlannerConfig = DEFAULT_CONFIG,
    auto_robot: bool = True,
    auto_robot_wall_delay: float | None = None,
) -> FastAPI:
    """Build the service.

    auto_robot_wall_delay is the real-time pause before a robot item
    auto-completes; None means the configured action duration.  The
    simulated Tick always carries the configured duration regardless of
    the wall delay, so logs are identical either way.
    """
    app = FastAPI(title="ergo-assist")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store_dir = resolve_data_dir(data_dir)
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()
    wall_delay = (
        config.robot_action_duration if auto_robot_wall_delay is None else auto_robot_wall_delay
    )

    def _broadcast(session: Session, entries: tuple[eng.LogEntry, ...]) -> None:
        for entry in entries:
            payload = eng.log_entry_to_dict(entry)
            for queue, loop in list(session.subscribers):
                loop.call_soon_threadsafe(queue.put_nowait, payload)

    def _schedule_auto(session: Session) -> None:
        """Arm the robot auto-completion for the current item, once."""
        state = session.state
        if not auto_robot or state.phase != eng.AWAITING_ROBOT:
            return
        if session.auto_cursor_scheduled == state.cursor:
            return
        session.auto_cursor_scheduled = state.cursor
        cursor = state.cursor
        step_id = state.current_step

        def fire() -> None:
            with session.lock:
                current = session.state
                if current.phase != eng.AWAITING_ROBOT or current.cursor != cursor:
                    return
                _apply_locked(
                    session,
                    [eng.Tick(dt=config.robot_action_duration), eng.RobotActionDone(step_id=step_id)],
                )

        timer = threading.Timer(wall_delay, fire)
        timer.daemon = True
        timer.start()

    def _apply_locked(session: Session, events: list[eng.Event]) -> tuple[eng.EngineState, tuple[eng.LogEntry, ...]]:
        """Apply events under the caller-held session lock; persist and
        broadcast whatever they produced."""
        before = len(session.state.log)
        for event in events:
            session.state = eng.dispatch(session.state, event)
        new_entries = session.state.log[before:]
        _append_entries(session, new_entries)
        _broadcast(session, new_entries)
        _schedule_auto(session)
        return session.state, new_entries

    def _get_session(session_id: str) -> Session | None:
        with sessions_lock:
            return sessions.get(session_id)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "invalid JSON body"}, status_code=400)
        if not isinstance(body, dict) or "scene" not in body:
            return JSONResponse({"error": "body must be {scene, task?}"}, status_code=400)
        task_name = body.get("task", "pouring_water")
        try:
            scene = load_scene(body["scene"])
            task = get_task(task_name)
        except (SceneError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session_id = uuid.uuid4().hex
        session = Session(
            session_id=session_id,
            state=eng.start_session(scene, task, config),
            created_at=time.time(),
            path=store_dir / f"{session_id}.jsonl",
        )
        _write_header(session, task_name)
        with sessions_lock:
            sessions[session_id] = session
        return {
            "session_id": session_id,
            "phase": session.state.phase,
            "scene": serialize_scene(scene),
            "task": task_name,
        }

    @app.get("/sessions/{session_id}")
    async def session_summary(session_id: str):
        session = _get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            state = session.state
            return {
                "session_id": session_id,
                "phase": state.phase,
                "clock": state.clock,
                "step": state.current_step,
                "scene": serialize_scene(state.scene),
                "cues": eng.cue_states(state),
                "log_length": len(state.log),
            }

    @app.get("/sessions/{session_id}/plan")
    async def session_plan(session_id: str):
        session = _get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            state = session.state
            if state.plan is not None:
                return plan_to_dict(state.plan)
            scene, task = state.scene, state.task
        try:
            plan = make_plan(scene, task, config)
        except NoFeasibleArrangement as exc:
            return JSONResponse(
                {"error": "no feasible arrangement", "detail": str(exc)}, status_code=409
            )
        return plan_to_dict(plan)

    @app.post("/sessions/{session_id}/events")
    async def post_event(session_id: str, request: Request):
        session = _get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        try:
            body = await request.json()
            event = eng.event_from_dict(body)
        except Exception as exc:
            return JSONResponse({"error": f"invalid event: {exc}"}, status_code=400)
        with session.lock:
            try:
                state, entries = _apply_locked(session, [event])
            except NoFeasibleArrangement as exc:
                return JSONResponse(
                    {"error": "no feasible arrangement", "detail": str(exc)}, status_code=409
                )
        status = "applied"
        for entry in entries:
            if entry.kind == "Event":
                status = entry.payload["status"]
                break
        body_out = {
            "status": status,
            "phase": state.phase,
            "clock": state.clock,
            "step": state.current_step,
            "emissions": [eng.log_entry_to_dict(e) for e in entries],
        }
        if status == "ignored":
            return JSONResponse(body_out, status_code=409)
        return body_out

    @app.get("/sessions/{session_id}/log")
    async def session_log(session_id: str, after: int = 0):
        session = _get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            entries = session.state.log[after:]
        return PlainTextResponse(eng.log_to_jsonl(entries), media_type="application/x-ndjson")

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = _get_session(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        loop = asyncio.get_running_loop()
        with session.lock:
            backlog = [eng.log_entry_to_dict(e) for e in session.state.log]
            session.subscribers.append((queue, loop))
        try:
            for payload in backlog:
                await websocket.send_text(json.dumps(payload, sort_keys=True))
            while True:
                payload = await queue.get()
                await websocket.send_text(json.dumps(payload, sort_keys=True))
        except WebSocketDisconnect:
            pass
        finally:
            with session.lock:
                if (queue, loop) in session.subscribers:
                    session.subscribers.remove((queue, loop))

    @app.get("/fixtures")
    async def fixtures():
        out = []
        if fixtures_dir is not None:
            base = Path(fixtures_dir)
            for path in sorted(base.glob("*.json")):
                try:
                    doc = json.loads(path.read_text(encoding="utf-8"))
                    load_scene(doc)
                except (SceneError, json.JSONDecodeError):
                    continue
                out.append({"name": path.stem, "scene": doc})
        return {"fixtures": out}

    return app
