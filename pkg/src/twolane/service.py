"""Session-based HTTP service around the executive.

Sessions are in-memory, fully independent, and internally serialized: one
instruction runs at a time per session, one more may queue, further
callers get 409 Busy. Every state change appends to a per-session event
log with a monotone sequence number; the SSE stream replays the log from
the start and then follows it live, so any two subscribers observe the
identical sequence. Episode results optionally write through to
append-only JSONL files for a restart-tolerant audit trail.
"""

from __future__ import annotations

import asyncio
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from . import bank as bank_mod
from . import executive, serde, sim
from .config import Config
from .errors import TwolaneError, UnsupportedFamily
from .model import Scene, caption

EVENT_POLL_S = 0.05
STEP_WAIT_S = 0.1


@dataclass
class Session:
    id: str
    scene: Scene
    config: Config
    exec_config: executive.ExecutiveConfig
    task: Optional[sim.TaskSpec] = None
    episodes: list[executive.EpisodeResult] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    seq: int = 0
    run_mode: str = "auto"  # "auto" | "step"
    step_credits: int = 0
    abort_requested: bool = False
    closed: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)  # episode exclusivity
    state_lock: threading.Lock = field(default_factory=threading.Lock)  # seq/events/waiters
    step_cv: threading.Condition = field(default_factory=threading.Condition)
    waiters: int = 0

    def emit(self, kind: str, data: dict) -> dict:
        with self.state_lock:
            self.seq += 1
            event = {"seq": self.seq, "kind": kind, "data": data}
            self.events.append(event)
            return event


class SessionStore:
    def __init__(self, config: Config):
        self.config = config
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, run_mode: str = "auto") -> Session:
        exec_config = self.config.executive_config()
        session = Session(
            id=uuid.uuid4().hex[:12],
            scene=Scene(width=self.config.sim_width, height=self.config.sim_height),
            config=self.config,
            exec_config=exec_config,
            run_mode=run_mode,
        )
        with self._lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None or session.closed:
            raise KeyError(session_id)
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            session = self.sessions.pop(session_id, None)
        if session is not None:
            session.closed = True
            with session.step_cv:
                session.abort_requested = True
                session.step_cv.notify_all()


def _episode_to_dict(result: executive.EpisodeResult) -> dict:
    return {
        "episode_id": result.episode_id,
        "instruction": result.instruction,
        "label": result.label.value if result.label else None,
        "neighbors": [{"entry_id": eid, "score": round(score, 9)} for eid, score in result.neighbors],
        "plan": (
            None
            if result.plan is None
            else {
                "source": result.plan.source.value,
                "steps": [
                    {
                        "index": s.index,
                        "text": s.text,
                        "predicate": serde.predicate_to_record(s.predicate),
                    }
                    for s in result.plan.steps
                ],
            }
        ),
        "step_statuses": [
            {
                "step_index": st.step_index,
                "status": st.status,
                "actions": [serde.action_to_record(a) for a in st.actions],
            }
            for st in result.step_statuses
        ],
        "actions": [serde.action_to_record(a) for a in result.actions],
        "success": result.success,
        "failure": (
            None
            if result.failure is None
            else {
                "stage": result.failure.stage.value,
                "detail": result.failure.detail,
                "step_index": result.failure.step_index,
            }
        ),
    }


def _persist_episode(session: Session, result: executive.EpisodeResult) -> None:
    log_dir = session.config.log_dir
    if not log_dir:
        return
    record = _episode_to_dict(result)
    if result.scene_before is not None:
        record["scene_before"] = serde.scene_to_dict(result.scene_before)
    path = Path(log_dir)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / f"{session.id}.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _run_instruction(session: Session, text: str) -> executive.EpisodeResult:
    """Run one episode under the session lock (callable from a worker thread)."""

    def gate():
        if session.run_mode != "step":
            if session.abort_requested:
                raise executive.EpisodeAborted("aborted by scene reset")
            return
        with session.step_cv:
            while not session.abort_requested and session.step_credits == 0:
                session.step_cv.wait(STEP_WAIT_S)
            if session.abort_requested:
                raise executive.EpisodeAborted("aborted by scene reset")
            session.step_credits -= 1

    def on_scene(scene: Scene):
        session.scene = scene

    with session.lock:
        episode_id = len(session.episodes)
        try:
            result, final_scene = executive.run_episode(
                session.exec_config,
                session.scene,
                text,
                task=session.task,
                episode_id=episode_id,
                on_event=session.emit,
                gate=gate,
                on_scene=on_scene,
            )
        finally:
            with session.step_cv:
                session.abort_requested = False
        session.scene = final_scene
        session.episodes.append(result)
        _persist_episode(session, result)
        return result


class CreateSessionBody(BaseModel):
    run_mode: str = "auto"


class ResetBody(BaseModel):
    seed: int
    family: str


class InstructionBody(BaseModel):
    text: str


def build_app(config: Optional[Config] = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="twolane", version="0.1.0")
    # The operator console is served as static files from another origin.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(config)
    app.state.store = store
    shared = {"exec_config": None}

    def shared_exec_config() -> executive.ExecutiveConfig:
        if shared["exec_config"] is None:
            shared["exec_config"] = config.executive_config()
        return shared["exec_config"]

    def get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}") from None

    @app.post("/v1/sessions")
    def create_session(body: CreateSessionBody = CreateSessionBody()):
        if body.run_mode not in ("auto", "step"):
            raise HTTPException(status_code=422, detail="run_mode must be 'auto' or 'step'")
        session = store.create(run_mode=body.run_mode)
        return {"id": session.id, "run_mode": session.run_mode, "config": config.to_dict()}

    @app.delete("/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        get_session(session_id)
        store.delete(session_id)
        return {"deleted": session_id}

    @app.post("/v1/sessions/{session_id}/reset")
    def reset_scene(session_id: str, body: ResetBody):
        session = get_session(session_id)
        with session.step_cv:
            if session.lock.locked():
                session.abort_requested = True
                session.step_cv.notify_all()
        with session.lock:  # waits for any aborting episode to unwind
            try:
                scene, task = sim.gen_scene(body.seed, body.family)
            except UnsupportedFamily as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from None
            session.scene = scene
            session.task = task
            session.emit(
                "scene_update",
                {
                    "episode_id": None,
                    "caption": caption(scene),
                    "scene": serde.scene_to_dict(scene),
                    "family": body.family,
                    "seed": body.seed,
                    "instruction_hint": task.instruction_text,
                },
            )
        return {
            "caption": caption(scene),
            "scene": serde.scene_to_dict(scene),
            "family": body.family,
            "instruction_hint": task.instruction_text,
        }

    @app.post("/v1/sessions/{session_id}/instruction")
    def post_instruction(session_id: str, body: InstructionBody):
        session = get_session(session_id)
        with session.state_lock:
            if session.waiters >= 2:  # one running + one queued
                raise HTTPException(status_code=409, detail="session busy, queue full")
            session.waiters += 1
        try:
            if session.run_mode == "step":
                episode_id = len(session.episodes)

                def worker():
                    try:
                        _run_instruction(session, body.text)
                    finally:
                        with session.state_lock:
                            session.waiters -= 1

                threading.Thread(target=worker, daemon=True).start()
                return {"episode_id": episode_id, "status": "running"}
            try:
                result = _run_instruction(session, body.text)
            finally:
                with session.state_lock:
                    session.waiters -= 1
            return _episode_to_dict(result)
        except HTTPException:
            raise

    @app.post("/v1/sessions/{session_id}/step")
    def release_step(session_id: str):
        session = get_session(session_id)
        with session.step_cv:
            session.step_credits += 1
            session.step_cv.notify_all()
            return {"step_credits": session.step_credits}

    @app.get("/v1/sessions/{session_id}/scene")
    def get_scene(session_id: str):
        session = get_session(session_id)
        scene = session.scene
        return {"caption": caption(scene), "scene": serde.scene_to_dict(scene)}

    @app.get("/v1/sessions/{session_id}/episodes/{n}")
    def get_episode(session_id: str, n: int):
        session = get_session(session_id)
        if not 0 <= n < len(session.episodes):
            raise HTTPException(status_code=404, detail=f"no episode {n}")
        return _episode_to_dict(session.episodes[n])

    @app.get("/v1/sessions/{session_id}/stream")
    async def stream(session_id: str, request: Request, idle_timeout_s: Optional[float] = None):
        """Replay the session's full event log, then follow it live.

        `idle_timeout_s` closes the feed after that long without a new
        event (clients reconnect and replay; the log is the state).
        """
        session = get_session(session_id)

        async def event_feed():
            idx = 0
            idle = 0.0
            while True:
                if session.closed or await request.is_disconnected():
                    return
                events = session.events
                progressed = idx < len(events)
                while idx < len(events):
                    event = events[idx]
                    idx += 1
                    payload = json.dumps(event["data"], sort_keys=True)
                    yield f"id: {event['seq']}\nevent: {event['kind']}\ndata: {payload}\n\n"
                if progressed:
                    idle = 0.0
                elif idle_timeout_s is not None and idle >= idle_timeout_s:
                    return
                await asyncio.sleep(EVENT_POLL_S)
                idle += EVENT_POLL_S

        return StreamingResponse(event_feed(), media_type="text/event-stream")

    @app.get("/v1/bank/classify")
    def bank_classify(text: str):
        exec_config = shared_exec_config()
        try:
            label, neighbors = bank_mod.classify(exec_config.bank, text, k=exec_config.k)
        except TwolaneError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "label": label.value,
            "neighbors": [
                {
                    "entry_id": eid,
                    "score": round(score, 9),
                    "text": exec_config.bank.entry(eid).text,
                    "label": exec_config.bank.entry(eid).label.value,
                }
                for eid, score in neighbors
            ],
        }

    return app


def serve(config: Config) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    host, _, port = config.server_listen_addr.partition(":")
    uvicorn.run(build_app(config), host=host or "127.0.0.1", port=int(port or 8712), log_level="warning")
