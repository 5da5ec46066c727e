"""Local HTTP service: server-authoritative simulation sessions for the
browser recorder, plus demo listing/retrieval.

All stepping happens server-side through the same dynamics the planner uses,
so recorded demonstrations are exactly consistent with the optimization
model.  The recorder commands a pusher velocity; the service differentiates
the velocity stream into the acceleration controls it stores.
"""
from __future__ import annotations

import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .demos import Demonstration, load_demo, save_demo
from .dynamics import (
    ContactFace,
    InteractionMode,
    PhysicalParams,
    SystemState,
    classify_mode,
    step,
)
from .planner import initial_state


class StepRequest(BaseModel):
    v_cmd: list[float] = Field(..., min_length=2, max_length=2)


class SwitchFaceRequest(BaseModel):
    face: str


class FinishRequest(BaseModel):
    label: str = ""


class SessionCreateRequest(BaseModel):
    face: str = "Left"


class _Session:
    def __init__(self, session_id: str, face: ContactFace, params: PhysicalParams):
        self.id = session_id
        self.params = params
        self.face = face
        self.state = initial_state(face, params)
        self.states = [self.state.as_vector()]
        self.controls: list[np.ndarray] = []
        self.faces: list[ContactFace] = []
        self.lock = threading.Lock()

    def step(self, v_cmd: list[float]) -> InteractionMode:
        v_cmd_arr = np.asarray(v_cmd, dtype=float)
        if not np.all(np.isfinite(v_cmd_arr)):
            raise ValueError("commanded velocity must be finite")
        u = (v_cmd_arr - self.state.velocity) / self.params.dt
        self.state, mode = step(self.state, u, self.face, self.params)
        self.states.append(self.state.as_vector())
        self.controls.append(u)
        self.faces.append(self.face)
        return mode

    def switch_face(self, face: ContactFace) -> None:
        mode = classify_mode(self.state, self.face, self.params)
        if mode != InteractionMode.SEPARATION:
            raise PermissionError(
                f"face switch requires separation; current mode is {mode.label}"
            )
        self.face = face

    def to_demo(self, label: str) -> Demonstration:
        if not self.controls:
            raise ValueError("recording contains no steps")
        faces = list(self.faces)
        demo = Demonstration(
            dt=self.params.dt,
            states=np.array(self.states),
            controls=np.array(self.controls),
            faces=faces,
            switch_times=[t for t in range(1, len(faces)) if faces[t] != faces[t - 1]],
            reached=self.state.pose,
            label=label,
        )
        demo.validate()
        return demo


def _state_payload(session: _Session, mode: InteractionMode | None = None) -> dict:
    if mode is None:
        mode = classify_mode(session.state, session.face, session.params)
    return {
        "id": session.id,
        "state": session.state.as_vector().tolist(),
        "mode": mode.label,
        "face": session.face.value,
        "steps": len(session.controls),
        "dt": session.params.dt,
        "geometry": {"r_s": session.params.r_s, "r_p": session.params.r_p},
    }


def create_app(
    demo_dir: str | Path,
    params: PhysicalParams | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    params = params or PhysicalParams()
    demo_dir = Path(demo_dir)
    demo_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="pushcraft recorder service")
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return session

    def parse_face(name: str) -> ContactFace:
        try:
            return ContactFace(name)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown face {name!r}") from None

    @app.post("/session")
    def create_session(req: SessionCreateRequest | None = None):
        face = parse_face(req.face if req else "Left")
        session_id = uuid.uuid4().hex[:12]
        session = _Session(session_id, face, params)
        with registry_lock:
            sessions[session_id] = session
        return _state_payload(session)

    @app.post("/session/{session_id}/step")
    def step_session(session_id: str, req: StepRequest):
        session = get_session(session_id)
        with session.lock:
            try:
                mode = session.step(req.v_cmd)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            return _state_payload(session, mode)

    @app.post("/session/{session_id}/switch-face")
    def switch_face(session_id: str, req: SwitchFaceRequest):
        session = get_session(session_id)
        face = parse_face(req.face)
        with session.lock:
            try:
                session.switch_face(face)
            except PermissionError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return _state_payload(session)

    @app.post("/session/{session_id}/finish")
    def finish_session(session_id: str, req: FinishRequest):
        session = get_session(session_id)
        with session.lock:
            try:
                demo = session.to_demo(req.label)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            demo_id = f"demo-{uuid.uuid4().hex[:8]}"
            save_demo(demo, demo_dir / f"{demo_id}.json")
        with registry_lock:
            sessions.pop(session_id, None)
        return {
            "demo_id": demo_id,
            "reached": [demo.reached.x, demo.reached.y, demo.reached.theta],
            "switches": demo.n_switches,
            "steps": demo.horizon,
        }

    @app.delete("/session/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with registry_lock:
            if sessions.pop(session_id, None) is None:
                raise HTTPException(status_code=404, detail=f"no session {session_id}")

    @app.get("/demos")
    def list_demos():
        entries = []
        for path in sorted(demo_dir.glob("*.json")):
            try:
                demo = load_demo(path)
            except Exception:
                continue
            entries.append(
                {
                    "id": path.stem,
                    "label": demo.label,
                    "reached": [demo.reached.x, demo.reached.y, demo.reached.theta],
                    "switches": demo.n_switches,
                    "steps": demo.horizon,
                    "dt": demo.dt,
                }
            )
        return entries

    @app.get("/demos/{demo_id}")
    def get_demo(demo_id: str):
        path = demo_dir / f"{demo_id}.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no demo {demo_id}")
        return load_demo(path).to_json_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="frontend")

    return app


def serve(
    port: int,
    demo_dir: str | Path,
    params: PhysicalParams | None = None,
    static_dir: str | Path | None = None,
    host: str = "127.0.0.1",
) -> None:
    import uvicorn

    app = create_app(demo_dir, params, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
