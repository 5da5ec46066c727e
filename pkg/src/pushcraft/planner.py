"""Cost assembly and the four planning variants over the pushing dynamics.

Methods:
  ZS  zero-started: reaching cost only, single default face, zero initial controls.
  DS  demo-started: reaching cost, face schedule and initial controls from the
      nearest demonstration.
  DP  demo-penalized: reaching cost plus soft demonstration-following terms
      (switch viapoints, velocity, acceleration), zero initial controls.
  WS  warm-started: a DP solve whose optimal controls seed a fresh solve of
      the plain reaching cost (the hierarchical chain).
"""
from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ddp import OcpProblem, PusherSliderModel, Solution, SolverConfig, solve
from .demos import (
    DemoLibrary,
    Demonstration,
    EmptyLibrary,
    first_contact_after_switch,
    resample,
    select_demo,
)
from .dynamics import (
    ContactFace,
    FloatArray,
    PhysicalParams,
    SliderPose,
    SystemState,
    rotation2,
    wrap_angle,
)

TASK_SPACE_XY = 0.25  # |x|, |y| bound of the task space (m)
SUCCESS_THRESHOLDS = (0.01, 0.01, math.radians(5.0))
INITIAL_CONTACT_SCALE = 1.3  # initial pusher offset along the face normal


class PlanMethod(enum.Enum):
    ZS = "zs"
    DS = "ds"
    DP = "dp"
    WS = "ws"


@dataclass(frozen=True)
class CostWeights:
    """Diagonal cost weights; contact rows are stored for a left/right final
    face and swapped for top/bottom ones."""

    q_terminal: FloatArray
    q_switch: FloatArray
    r_control: FloatArray
    q_bound: FloatArray
    r_demo_vel: FloatArray
    r_demo_acc: FloatArray
    u_limit: FloatArray

    def __post_init__(self):
        for name in ("q_terminal", "q_switch", "r_control", "q_bound", "r_demo_vel", "r_demo_acc", "u_limit"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.u_limit <= 0):
            raise ValueError("u_limit must be positive")
        for name in ("q_terminal", "q_switch", "r_control", "q_bound", "r_demo_vel", "r_demo_acc"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be nonnegative")

    @classmethod
    def default(cls) -> "CostWeights":
        return cls(
            q_terminal=1e6 * np.array([1.0, 1.0, 1.0, 1e1, 1e-5, 1e-3, 1e-3]),
            q_switch=1e6 * np.array([1e-3, 1e-3, 1e-3, 1.0, 0.0, 0.0, 0.0]),
            r_control=np.array([1.0, 1.0]),
            q_bound=np.array([1e6, 1e6]),
            r_demo_vel=np.array([100.0, 100.0]),
            r_demo_acc=np.array([100.0, 100.0]),
            u_limit=np.array([0.5, 0.5]),
        )


def soft_threshold(u: FloatArray, u_limit: FloatArray) -> FloatArray:
    """Zero inside the box [-u_limit, u_limit], linear excess outside."""
    u = np.asarray(u, dtype=float)
    return np.maximum(u - u_limit, 0.0) + np.minimum(u + u_limit, 0.0)


def _oriented(diag: FloatArray, face: ContactFace) -> FloatArray:
    """Swap the two contact-row weights for top/bottom faces, where the
    face normal lies along y of the initial slider frame instead of x."""
    out = diag.copy()
    if face not in (ContactFace.LEFT, ContactFace.RIGHT):
        out[3], out[4] = out[4], out[3]
    return out


def _pose_residual(x: FloatArray, mu: FloatArray) -> FloatArray:
    res = x - mu
    res[2] = wrap_angle(res[2])
    return res


class PoseTerminalCost:
    """Diagonal quadratic on the full state with an angle-wrapped residual."""

    def __init__(self, qt_diag: FloatArray, mu: FloatArray):
        self.qt = np.asarray(qt_diag, dtype=float)
        self.mu = np.asarray(mu, dtype=float)

    def value(self, x):
        res = _pose_residual(np.asarray(x, dtype=float), self.mu)
        return float(res @ (self.qt * res))

    def derivatives(self, x):
        res = _pose_residual(np.asarray(x, dtype=float), self.mu)
        return 2.0 * self.qt * res, 2.0 * np.diag(self.qt)


class PushStageCost:
    """Control regularizer, soft control-bound penalty, and optional
    demonstration-following terms (switch viapoints, velocity, acceleration)."""

    def __init__(
        self,
        r_control: FloatArray,
        q_bound: FloatArray,
        u_limit: FloatArray,
        demo_velocities: FloatArray | None = None,
        r_demo_vel: FloatArray | None = None,
        demo_controls: FloatArray | None = None,
        r_demo_acc: FloatArray | None = None,
        viapoints: dict[int, tuple[FloatArray, FloatArray]] | None = None,
    ):
        self.r = np.asarray(r_control, dtype=float)
        self.q_bound = np.asarray(q_bound, dtype=float)
        self.u_limit = np.asarray(u_limit, dtype=float)
        self.demo_velocities = demo_velocities
        self.r_demo_vel = r_demo_vel
        self.demo_controls = demo_controls
        self.r_demo_acc = r_demo_acc
        self.viapoints = viapoints or {}

    def value(self, x, u, t):
        u = np.asarray(u, dtype=float)
        cut = soft_threshold(u, self.u_limit)
        val = float(u @ (self.r * u) + cut @ (self.q_bound * cut))
        if self.demo_controls is not None:
            du = u - self.demo_controls[t]
            val += float(du @ (self.r_demo_acc * du))
        if self.demo_velocities is not None:
            dv = np.asarray(x, dtype=float)[5:7] - self.demo_velocities[t]
            val += float(dv @ (self.r_demo_vel * dv))
        via = self.viapoints.get(t)
        if via is not None:
            mu, qn = via
            res = _pose_residual(np.asarray(x, dtype=float), mu)
            val += float(res @ (qn * res))
        return val

    def derivatives(self, x, u, t):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        cut = soft_threshold(u, self.u_limit)
        active = (np.abs(u) > self.u_limit).astype(float)
        lu = 2.0 * self.r * u + 2.0 * active * self.q_bound * cut
        luu_diag = 2.0 * (self.r + active * self.q_bound)
        lx = np.zeros(7)
        lxx_diag = np.zeros(7)
        if self.demo_controls is not None:
            du = u - self.demo_controls[t]
            lu = lu + 2.0 * self.r_demo_acc * du
            luu_diag = luu_diag + 2.0 * self.r_demo_acc
        if self.demo_velocities is not None:
            dv = x[5:7] - self.demo_velocities[t]
            lx[5:7] += 2.0 * self.r_demo_vel * dv
            lxx_diag[5:7] += 2.0 * self.r_demo_vel
        via = self.viapoints.get(t)
        if via is not None:
            mu, qn = via
            res = _pose_residual(x, mu)
            lx += 2.0 * qn * res
            lxx_diag += 2.0 * qn
        return lx, lu, np.diag(lxx_diag), np.diag(luu_diag), np.zeros((2, 7))

    def value_trajectory(self, xs, us):
        """Sum of stage values over a whole trajectory, vectorized."""
        us = np.asarray(us, dtype=float)
        cut = np.maximum(us - self.u_limit, 0.0) + np.minimum(us + self.u_limit, 0.0)
        val = float(np.sum(us * us * self.r) + np.sum(cut * cut * self.q_bound))
        if self.demo_controls is not None:
            du = us - self.demo_controls
            val += float(np.sum(du * du * self.r_demo_acc))
        if self.demo_velocities is not None:
            dv = np.asarray(xs, dtype=float)[:-1, 5:7] - self.demo_velocities
            val += float(np.sum(dv * dv * self.r_demo_vel))
        for t, (mu, qn) in self.viapoints.items():
            res = _pose_residual(np.asarray(xs[t], dtype=float), mu)
            val += float(res @ (qn * res))
        return val

    def derivatives_trajectory(self, xs, us):
        """Stacked stage derivatives (lx, lu, lxx, luu, lux) over a trajectory."""
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        T = len(us)
        cut = np.maximum(us - self.u_limit, 0.0) + np.minimum(us + self.u_limit, 0.0)
        active = (np.abs(us) > self.u_limit).astype(float)
        lu = 2.0 * self.r * us + 2.0 * active * self.q_bound * cut
        luu_diag = 2.0 * (self.r + active * self.q_bound)
        lx = np.zeros((T, 7))
        lxx_diag = np.zeros((T, 7))
        if self.demo_controls is not None:
            du = us - self.demo_controls
            lu = lu + 2.0 * self.r_demo_acc * du
            luu_diag = luu_diag + 2.0 * self.r_demo_acc
        if self.demo_velocities is not None:
            dv = xs[:-1, 5:7] - self.demo_velocities
            lx[:, 5:7] = 2.0 * self.r_demo_vel * dv
            lxx_diag[:, 5:7] = 2.0 * self.r_demo_vel
        for t, (mu, qn) in self.viapoints.items():
            res = _pose_residual(xs[t].copy(), mu)
            lx[t] += 2.0 * qn * res
            lxx_diag[t] += 2.0 * qn
        idx = np.arange(7)
        lxx = np.zeros((T, 7, 7))
        lxx[:, idx, idx] = lxx_diag
        idx2 = np.arange(2)
        luu = np.zeros((T, 2, 2))
        luu[:, idx2, idx2] = luu_diag
        lux = np.zeros((T, 2, 7))
        return lx, lu, lxx, luu, lux


def centered_contact(face: ContactFace, params: PhysicalParams) -> FloatArray:
    """Contact point at the middle of the given face, in the initial slider frame."""
    return rotation2(face.theta_f) @ np.array([-params.contact_radius, 0.0])


def initial_state(
    face: ContactFace, params: PhysicalParams, alpha: float = INITIAL_CONTACT_SCALE
) -> SystemState:
    """Slider at the origin with the pusher backed off along the face normal
    (separation mode), letting the solver pick the contact point."""
    contact = rotation2(face.theta_f) @ np.array([-alpha * params.contact_radius, 0.0])
    return SystemState(SliderPose(0.0, 0.0, 0.0), contact, np.zeros(2))


def _terminal_anchor(target: SliderPose, contact_anchor: FloatArray) -> FloatArray:
    return np.array(
        [
            target.x,
            target.y,
            wrap_angle(target.theta),
            contact_anchor[0],
            contact_anchor[1],
            0.0,
            0.0,
        ]
    )


def build_cost_c1(
    target: SliderPose,
    weights: CostWeights,
    final_face: ContactFace,
    contact_anchor: FloatArray | None = None,
    params: PhysicalParams | None = None,
) -> tuple[PushStageCost, PoseTerminalCost]:
    """Reaching cost: terminal pose anchor plus control regularizer and bound penalty."""
    if contact_anchor is None:
        contact_anchor = centered_contact(final_face, params or PhysicalParams())
    stage = PushStageCost(weights.r_control, weights.q_bound, weights.u_limit)
    terminal = PoseTerminalCost(
        _oriented(weights.q_terminal, final_face), _terminal_anchor(target, contact_anchor)
    )
    return stage, terminal


def build_cost_c2(
    target: SliderPose,
    demo: Demonstration,
    weights: CostWeights,
    params: PhysicalParams | None = None,
) -> tuple[PushStageCost, PoseTerminalCost]:
    """Reaching cost plus demonstration-following terms.

    The demo must already be resampled to the planning horizon.  Switch
    viapoints anchor the full state at each face-switch step, with the
    contact-row weight oriented by the face after the switch.  The anchor's
    contact coordinates are read at the step where the demo actually touches
    the new face: the heavily weighted row then means "engage the new face
    where the demonstration did" instead of pinning a mid-transit pusher
    position, which was measured to fight the reaching objective.
    """
    params = params or PhysicalParams()
    final_face = demo.faces[-1]
    viapoints = {}
    for t in demo.switch_times:
        mu = demo.states[t].copy()
        mu[3:5] = demo.states[first_contact_after_switch(demo, t, params), 3:5]
        viapoints[t] = (mu, _oriented(weights.q_switch, demo.faces[t]))
    stage = PushStageCost(
        weights.r_control,
        weights.q_bound,
        weights.u_limit,
        demo_velocities=demo.states[:-1, 5:7],
        r_demo_vel=weights.r_demo_vel,
        demo_controls=demo.controls,
        r_demo_acc=weights.r_demo_acc,
        viapoints=viapoints,
    )
    terminal = PoseTerminalCost(
        _oriented(weights.q_terminal, final_face),
        _terminal_anchor(target, demo.states[-1, 3:5]),
    )
    return stage, terminal


@dataclass
class PlanRequest:
    target: SliderPose
    method: PlanMethod
    library: DemoLibrary | None = None
    horizon: int = 200
    params: PhysicalParams = field(default_factory=PhysicalParams)
    weights: CostWeights = field(default_factory=CostWeights.default)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if isinstance(self.method, str):
            self.method = PlanMethod(self.method.lower())
        if abs(self.target.x) > TASK_SPACE_XY or abs(self.target.y) > TASK_SPACE_XY:
            raise ValueError(
                f"target position ({self.target.x}, {self.target.y}) outside the "
                f"task space |x|,|y| <= {TASK_SPACE_XY}"
            )
        self.target = self.target.wrapped()


@dataclass
class PlanReport:
    solution: Solution
    method: PlanMethod
    target: SliderPose
    demo_index: int | None
    x_err: float
    y_err: float
    theta_err: float
    success: bool
    wall_time_s: float
    warm_start: "PlanReport | None" = None

    @property
    def errors(self) -> tuple[float, float, float]:
        return (self.x_err, self.y_err, self.theta_err)

    def to_json_dict(self) -> dict:
        doc = {
            "method": self.method.value,
            "target": [self.target.x, self.target.y, self.target.theta],
            "demo_index": self.demo_index,
            "x_err": self.x_err,
            "y_err": self.y_err,
            "theta_err": self.theta_err,
            "success": self.success,
            "wall_time_s": self.wall_time_s,
            "cost": self.solution.cost,
            "iterations": self.solution.iterations,
            "converged": self.solution.converged,
        }
        if self.warm_start is not None:
            doc["warm_start"] = self.warm_start.to_json_dict()
        return doc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()))


def evaluate_success(errors: tuple[float, float, float]) -> bool:
    """Strict per-axis thresholds: 1 cm, 1 cm, 5 degrees."""
    ex, ey, eth = errors
    if ex < 0 or ey < 0 or eth < 0:
        raise ValueError("errors must be nonnegative")
    tx, ty, tth = SUCCESS_THRESHOLDS
    return bool(ex < tx and ey < ty and eth < tth)


def _final_errors(solution: Solution, target: SliderPose) -> tuple[float, float, float]:
    final = solution.states[-1]
    return (
        float(abs(final[0] - target.x)),
        float(abs(final[1] - target.y)),
        float(abs(wrap_angle(final[2] - target.theta))),
    )


def _selected_demo(request: PlanRequest) -> tuple[int, Demonstration]:
    if request.library is None or request.library.n_d < 1:
        raise EmptyLibrary(f"method {request.method.value} requires a demo library")
    idx = select_demo(request.library, request.target)
    return idx, resample(request.library.demos[idx], request.horizon)


def plan(request: PlanRequest) -> PlanReport:
    """Run one planning method and report per-axis errors against the target."""
    t_start = time.perf_counter()
    params = request.params
    model = PusherSliderModel(params)
    T = request.horizon
    demo_index: int | None = None
    warm_report: PlanReport | None = None

    if request.method == PlanMethod.ZS:
        faces = [ContactFace.LEFT] * T
        stage, terminal = build_cost_c1(
            request.target, request.weights, ContactFace.LEFT, params=params
        )
        u0 = np.zeros((T, 2))
    elif request.method == PlanMethod.DS:
        demo_index, demo = _selected_demo(request)
        faces = list(demo.faces)
        stage, terminal = build_cost_c1(
            request.target, request.weights, faces[-1], contact_anchor=demo.states[-1, 3:5]
        )
        u0 = demo.controls.copy()
    elif request.method == PlanMethod.DP:
        demo_index, demo = _selected_demo(request)
        faces = list(demo.faces)
        stage, terminal = build_cost_c2(request.target, demo, request.weights, params)
        # The soft-constrained solve modifies the demo-started one only through
        # its cost, so it inherits the demonstrated controls as initial guess.
        u0 = demo.controls.copy()
    elif request.method == PlanMethod.WS:
        dp_request = PlanRequest(
            target=request.target,
            method=PlanMethod.DP,
            library=request.library,
            horizon=request.horizon,
            params=request.params,
            weights=request.weights,
            solver=request.solver,
        )
        warm_report = plan(dp_request)
        demo_index = warm_report.demo_index
        faces = list(warm_report.solution.face_schedule)
        anchor = warm_report.solution.states[-1][3:5]
        # Anchor the free solve's terminal contact to where DP ended, staying
        # consistent with the schedule it committed to.
        stage, terminal = build_cost_c1(
            request.target, request.weights, faces[-1], contact_anchor=anchor
        )
        u0 = warm_report.solution.controls.copy()
    else:  # pragma: no cover
        raise ValueError(f"unknown method {request.method}")

    problem = OcpProblem(
        horizon=T,
        initial_state=initial_state(faces[0], params).as_vector(),
        stage_cost=stage,
        terminal_cost=terminal,
        dynamics=model,
        face_schedule=faces,
        angular_indices=(2,),
    )
    solution = solve(problem, u0, request.solver)
    errors = _final_errors(solution, request.target)
    report = PlanReport(
        solution=solution,
        method=request.method,
        target=request.target,
        demo_index=demo_index,
        x_err=errors[0],
        y_err=errors[1],
        theta_err=errors[2],
        success=evaluate_success(errors),
        wall_time_s=time.perf_counter() - t_start,
        warm_start=warm_report,
    )
    return report
