"""Iterative LQR solver over the hybrid pushing dynamics.

The solver works on raw state vectors so it can also be exercised on plain
linear-quadratic instances.  A problem bundles a dynamics model, a stage cost,
and a terminal cost:

* dynamics model (duck-typed): ``rollout_step(x, u, face)`` advances the true
  hybrid system one step; ``classify(x, face)`` names the interaction mode (or
  returns ``None`` for mode-free systems); ``step_frozen_batch(xs, us, face,
  mode)`` evaluates an unwrapped, mode-frozen step on a batch of rows, which
  is what the central-difference linearization perturbs.  A model may provide
  ``linearize_trajectory`` to batch the differencing itself.
* costs (duck-typed): stage costs expose ``value(x, u, t)`` and
  ``derivatives(x, u, t) -> (lx, lu, lxx, luu, lux)``; terminal costs expose
  ``value(x)`` and ``derivatives(x) -> (gx, gxx)``.

The backward pass is Gauss-Newton (no second-order dynamics terms) with
Levenberg-Marquardt regularization on Q_uu; the forward pass rolls the true
hybrid dynamics with a backtracking line search on the feedforward step.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import (
    ContactFace,
    FloatArray,
    PhysicalParams,
    classify_batch,
    classify_mode,
    step_batch_frozen,
    step_vector,
    SystemState,
    wrap_angle,
)


class NotPositiveDefinite(Exception):
    """Q_uu failed its Cholesky factorization at some timestep."""


class NonFiniteRollout(Exception):
    """A rollout produced a non-finite state component."""


class Trajectory(NamedTuple):
    states: FloatArray  # (T+1, n)
    controls: FloatArray  # (T, m)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    cost_tolerance: float = 1e-7
    reg_init: float = 1e-9
    reg_min: float = 1e-9
    reg_max: float = 1e9
    backtrack_factor: float = 0.5
    min_step: float = 2.0**-10
    fd_step: float = 1e-6

    def __post_init__(self) -> None:
        for name in (
            "max_iterations",
            "cost_tolerance",
            "reg_init",
            "reg_min",
            "reg_max",
            "backtrack_factor",
            "min_step",
            "fd_step",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must lie in (0, 1)")


@dataclass
class OcpProblem:
    """Finite-horizon optimal control problem over a fixed face schedule."""

    horizon: int
    initial_state: FloatArray
    stage_cost: object
    terminal_cost: object
    dynamics: object
    face_schedule: Sequence[ContactFace] | None = None
    angular_indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        self.initial_state = np.asarray(self.initial_state, dtype=float)
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.face_schedule is not None and len(self.face_schedule) != self.horizon:
            raise ValueError("face schedule length must equal the horizon")
        if not np.all(np.isfinite(self.initial_state)):
            raise ValueError("initial state must be finite")

    def face_at(self, t: int) -> ContactFace | None:
        return None if self.face_schedule is None else self.face_schedule[t]

    def deviation(self, x: FloatArray, x_ref: FloatArray) -> FloatArray:
        d = x - x_ref
        for i in self.angular_indices:
            d[i] = wrap_angle(d[i])
        return d


@dataclass
class Solution:
    """Optimized trajectory with its time-varying feedback law u = u_ff + K (x - x_ref)."""

    states: FloatArray  # (T+1, n)
    controls: FloatArray  # (T, m)
    gains: FloatArray  # (T, m, n)
    cost: float
    iterations: int
    converged: bool
    dt: float | None = None
    face_schedule: list[ContactFace] | None = None
    angular_indices: tuple[int, ...] = ()
    cost_history: list[float] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.controls)

    def to_json_dict(self) -> dict:
        return {
            "dt": self.dt,
            "face_schedule": None
            if self.face_schedule is None
            else [f.value for f in self.face_schedule],
            "states": self.states.tolist(),
            "controls": self.controls.tolist(),
            "gains": self.gains.reshape(self.horizon, -1).tolist(),
            "cost": self.cost,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()))

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Solution":
        states = np.asarray(doc["states"], dtype=float)
        controls = np.asarray(doc["controls"], dtype=float)
        T, m = controls.shape
        n = states.shape[1]
        gains = np.asarray(doc["gains"], dtype=float).reshape(T, m, n)
        faces = doc.get("face_schedule")
        return cls(
            states=states,
            controls=controls,
            gains=gains,
            cost=float(doc["cost"]),
            iterations=int(doc.get("iterations", 0)),
            converged=bool(doc.get("converged", False)),
            dt=doc.get("dt"),
            face_schedule=None if faces is None else [ContactFace(f) for f in faces],
            angular_indices=(2,) if faces is not None else (),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Solution":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


class BackwardPassResult(NamedTuple):
    gains: FloatArray  # (T, m, n)
    feedforward: FloatArray  # (T, m)
    expected_improvement: float
    q_x: FloatArray  # (T, n) cost-to-go gradients wrt state
    q_u: FloatArray  # (T, m) cost-to-go gradients wrt control


# ---------------------------------------------------------------------------
# Cost and dynamics building blocks
# ---------------------------------------------------------------------------


class QuadraticStageCost:
    """(x-xr)' Q (x-xr) + (u-ur)' R (u-ur), constant references."""

    def __init__(self, Q: FloatArray, R: FloatArray, x_ref=None, u_ref=None):
        self.Q = np.asarray(Q, dtype=float)
        self.R = np.asarray(R, dtype=float)
        n, m = self.Q.shape[0], self.R.shape[0]
        self.x_ref = np.zeros(n) if x_ref is None else np.asarray(x_ref, dtype=float)
        self.u_ref = np.zeros(m) if u_ref is None else np.asarray(u_ref, dtype=float)

    def value(self, x, u, t):
        dx, du = x - self.x_ref, u - self.u_ref
        return float(dx @ self.Q @ dx + du @ self.R @ du)

    def derivatives(self, x, u, t):
        dx, du = x - self.x_ref, u - self.u_ref
        n, m = len(dx), len(du)
        return (
            2.0 * self.Q @ dx,
            2.0 * self.R @ du,
            2.0 * self.Q,
            2.0 * self.R,
            np.zeros((m, n)),
        )


class QuadraticTerminalCost:
    """(x-xr)' QT (x-xr)."""

    def __init__(self, QT: FloatArray, x_ref=None):
        self.QT = np.asarray(QT, dtype=float)
        n = self.QT.shape[0]
        self.x_ref = np.zeros(n) if x_ref is None else np.asarray(x_ref, dtype=float)

    def value(self, x):
        dx = x - self.x_ref
        return float(dx @ self.QT @ dx)

    def derivatives(self, x):
        dx = x - self.x_ref
        return 2.0 * self.QT @ dx, 2.0 * self.QT


class LinearDynamicsModel:
    """x_{t+1} = A x + B u; mode-free, used for solver verification.

    Supplies its Jacobians exactly (they are just A and B); finite differencing
    a linear map would only add rounding noise.
    """

    def __init__(self, A: FloatArray, B: FloatArray):
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)

    def rollout_step(self, x, u, face):
        return self.A @ x + self.B @ u

    def classify(self, x, face):
        return None

    def step_frozen_batch(self, xs, us, face, mode):
        return xs @ self.A.T + us @ self.B.T

    def linearize_trajectory(self, xs, us, faces, h):
        T = len(us)
        return (
            np.broadcast_to(self.A, (T, *self.A.shape)).copy(),
            np.broadcast_to(self.B, (T, *self.B.shape)).copy(),
        )


class PusherSliderModel:
    """Hybrid pushing dynamics adapter for the solver."""

    def __init__(self, params: PhysicalParams):
        self.params = params

    def rollout_step(self, x, u, face):
        nxt, _ = step_vector(x, u, face, self.params)
        return nxt

    def classify(self, x, face):
        return int(
            classify_mode(SystemState.from_vector(x), face, self.params)
        )

    def step_frozen_batch(self, xs, us, face, mode):
        n = len(xs)
        theta_f = np.full(n, face.theta_f)
        modes = np.full(n, int(mode))
        return step_batch_frozen(xs, us, theta_f, modes, self.params)

    def linearize_trajectory(self, xs, us, faces, h):
        """Central differences of the mode-frozen Euler step, fused over all steps."""
        T = len(us)
        n, m = 7, 2
        theta_f = np.array([f.theta_f for f in faces])
        modes = classify_batch(xs[:T], theta_f, self.params)

        eye_n = np.eye(n) * h
        xp = (xs[:T, None, :] + eye_n[None, :, :]).reshape(T * n, n)
        xm = (xs[:T, None, :] - eye_n[None, :, :]).reshape(T * n, n)
        u_rep = np.repeat(us, n, axis=0)
        th_rep = np.repeat(theta_f, n)
        mo_rep = np.repeat(modes, n)
        fp = step_batch_frozen(xp, u_rep, th_rep, mo_rep, self.params)
        fm = step_batch_frozen(xm, u_rep, th_rep, mo_rep, self.params)
        # Row j of each (n, n) block is f(x + h e_j), i.e. column j of A.
        A = np.transpose((fp - fm).reshape(T, n, n), (0, 2, 1)) / (2.0 * h)

        eye_m = np.eye(m) * h
        up = (us[:, None, :] + eye_m[None, :, :]).reshape(T * m, m)
        um = (us[:, None, :] - eye_m[None, :, :]).reshape(T * m, m)
        x_rep = np.repeat(xs[:T], m, axis=0)
        th_rep = np.repeat(theta_f, m)
        mo_rep = np.repeat(modes, m)
        gp = step_batch_frozen(x_rep, up, th_rep, mo_rep, self.params)
        gm = step_batch_frozen(x_rep, um, th_rep, mo_rep, self.params)
        B = np.transpose((gp - gm).reshape(T, m, n), (0, 2, 1)) / (2.0 * h)
        return A, B


# ---------------------------------------------------------------------------
# Solver operations
# ---------------------------------------------------------------------------


def linearize(
    problem: OcpProblem, x: FloatArray, u: FloatArray, t: int, h: float = 1e-6
) -> tuple[FloatArray, FloatArray]:
    """First-order model (A, B) of the discrete step at (x, u).

    Central finite differences of the step map with the interaction mode
    frozen to its classification at the nominal point, so every perturbed
    evaluation stays on the same branch of the motion equation.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    n, m = len(x), len(u)
    face = problem.face_at(t)
    mode = problem.dynamics.classify(x, face)

    xp = x[None, :] + np.eye(n) * h
    xm = x[None, :] - np.eye(n) * h
    u_rep = np.tile(u, (n, 1))
    fp = problem.dynamics.step_frozen_batch(xp, u_rep, face, mode)
    fm = problem.dynamics.step_frozen_batch(xm, u_rep, face, mode)
    A = (fp - fm).T / (2.0 * h)

    up = u[None, :] + np.eye(m) * h
    um = u[None, :] - np.eye(m) * h
    x_rep = np.tile(x, (m, 1))
    gp = problem.dynamics.step_frozen_batch(x_rep, up, face, mode)
    gm = problem.dynamics.step_frozen_batch(x_rep, um, face, mode)
    B = (gp - gm).T / (2.0 * h)
    return A, B


def _linearize_trajectory(problem: OcpProblem, xs, us, h):
    model = problem.dynamics
    if hasattr(model, "linearize_trajectory"):
        return model.linearize_trajectory(xs, us, problem.face_schedule, h)
    T = len(us)
    n, m = xs.shape[1], us.shape[1]
    A = np.empty((T, n, n))
    B = np.empty((T, n, m))
    for t in range(T):
        A[t], B[t] = linearize(problem, xs[t], us[t], t, h)
    return A, B


def rollout_controls(problem: OcpProblem, controls: FloatArray) -> FloatArray:
    """Open-loop rollout of a control sequence through the true dynamics."""
    us = np.asarray(controls, dtype=float)
    T = problem.horizon
    xs = np.empty((T + 1, len(problem.initial_state)))
    xs[0] = problem.initial_state
    for t in range(T):
        xs[t + 1] = problem.dynamics.rollout_step(xs[t], us[t], problem.face_at(t))
        if not np.all(np.isfinite(xs[t + 1])):
            raise NonFiniteRollout(f"non-finite state at step {t + 1}")
    return xs


def evaluate_cost(problem: OcpProblem, xs: FloatArray, us: FloatArray) -> float:
    stage = problem.stage_cost
    if hasattr(stage, "value_trajectory"):
        total = stage.value_trajectory(xs, us)
    else:
        total = sum(stage.value(xs[t], us[t], t) for t in range(len(us)))
    return total + problem.terminal_cost.value(xs[-1])


def _solve_gain(Quu, Qux, Qu, t):
    """Feedback/feedforward from the regularized Q_uu; 2x2 handled closed-form."""
    if Quu.shape[0] == 2:
        a, b, c = Quu[0, 0], 0.5 * (Quu[0, 1] + Quu[1, 0]), Quu[1, 1]
        det = a * c - b * b
        if a <= 0.0 or det <= 0.0:
            raise NotPositiveDefinite(f"Q_uu not positive definite at t={t}")
        inv = np.array([[c, -b], [-b, a]]) / det
        return -inv @ Qux, -inv @ Qu
    try:
        np.linalg.cholesky(Quu)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"Q_uu not positive definite at t={t}") from None
    return -np.linalg.solve(Quu, Qux), -np.linalg.solve(Quu, Qu)


def backward_pass(
    problem: OcpProblem,
    nominal: Trajectory,
    regularization: float,
    jacobians: tuple[FloatArray, FloatArray] | None = None,
) -> BackwardPassResult:
    """Riccati-like recursion on the quadratized cost-to-go.

    Raises:
        NotPositiveDefinite: when the regularized Q_uu is not positive
            definite; the caller should increase the regularization and retry.
    """
    xs, us = nominal
    T = len(us)
    n, m = xs.shape[1], us.shape[1]
    if jacobians is None:
        jacobians = _linearize_trajectory(problem, xs, us, SolverConfig().fd_step)
    A, B = jacobians

    stage = problem.stage_cost
    stage_derivs = (
        stage.derivatives_trajectory(xs, us) if hasattr(stage, "derivatives_trajectory") else None
    )

    Vx, Vxx = problem.terminal_cost.derivatives(xs[T])
    gains = np.zeros((T, m, n))
    feedforward = np.zeros((T, m))
    q_x = np.zeros((T, n))
    q_u = np.zeros((T, m))
    reg_eye = regularization * np.eye(m)
    expected = 0.0

    for t in range(T - 1, -1, -1):
        if stage_derivs is not None:
            lx, lu, lxx, luu, lux = (arr[t] for arr in stage_derivs)
        else:
            lx, lu, lxx, luu, lux = stage.derivatives(xs[t], us[t], t)
        At, Bt = A[t], B[t]
        VxxA = Vxx @ At
        Qx = lx + At.T @ Vx
        Qu = lu + Bt.T @ Vx
        Qxx = lxx + At.T @ VxxA
        Quu = luu + Bt.T @ Vxx @ Bt + reg_eye
        Qux = lux + Bt.T @ VxxA
        K, k = _solve_gain(Quu, Qux, Qu, t)
        expected += float(-k @ Qu - 0.5 * k @ Quu @ k)

        Vx = Qx + K.T @ Quu @ k + K.T @ Qu + Qux.T @ k
        Vxx = Qxx + K.T @ Quu @ K + K.T @ Qux + Qux.T @ K
        Vxx = 0.5 * (Vxx + Vxx.T)

        gains[t] = K
        feedforward[t] = k
        q_x[t] = Qx
        q_u[t] = Qu

    return BackwardPassResult(gains, feedforward, max(expected, 0.0), q_x, q_u)


def forward_pass(
    problem: OcpProblem,
    nominal: Trajectory,
    gains: FloatArray,
    feedforward: FloatArray,
    alpha: float,
) -> tuple[Trajectory, float]:
    """Closed-loop rollout of u = u_hat + alpha k + K (x - x_hat) through the true dynamics."""
    xs_nom, us_nom = nominal
    T = len(us_nom)
    xs = np.empty_like(xs_nom)
    us = np.empty_like(us_nom)
    xs[0] = problem.initial_state
    for t in range(T):
        dx = problem.deviation(xs[t], xs_nom[t])
        us[t] = us_nom[t] + alpha * feedforward[t] + gains[t] @ dx
        xs[t + 1] = problem.dynamics.rollout_step(xs[t], us[t], problem.face_at(t))
        if not np.all(np.isfinite(xs[t + 1])):
            raise NonFiniteRollout(f"non-finite state at step {t + 1}")
    return Trajectory(xs, us), evaluate_cost(problem, xs, us)


def _final_gains(problem, nominal, jacobians, reg_floor, reg_max):
    reg = reg_floor
    while True:
        try:
            return backward_pass(problem, nominal, reg, jacobians)
        except NotPositiveDefinite:
            reg *= 10.0
            if reg > reg_max:
                raise


def solve(
    problem: OcpProblem,
    initial_controls: FloatArray | None = None,
    config: SolverConfig | None = None,
) -> Solution:
    """Iterate backward/forward passes until the cost stops improving.

    Always returns the best trajectory found; ``converged`` reports whether the
    relative cost decrease (or the expected improvement of the quadratic
    model) fell below the tolerance before the iteration budget ran out.
    """
    cfg = config or SolverConfig()
    T = problem.horizon
    if initial_controls is None:
        us = np.zeros((T, 2))
    else:
        us = np.array(initial_controls, dtype=float)
        if us.shape[0] != T:
            raise ValueError("initial controls length must equal the horizon")
    xs = rollout_controls(problem, us)
    cost = evaluate_cost(problem, xs, us)
    history = [cost]

    reg = cfg.reg_init
    converged = False
    iterations = 0
    jac = None
    bp_current: BackwardPassResult | None = None  # matches the current nominal

    while iterations < cfg.max_iterations:
        iterations += 1
        if jac is None:
            jac = _linearize_trajectory(problem, xs, us, cfg.fd_step)
        try:
            bp = backward_pass(problem, Trajectory(xs, us), reg, jac)
        except NotPositiveDefinite:
            reg *= 10.0
            if reg > cfg.reg_max:
                break
            continue
        bp_current = bp

        if bp.expected_improvement <= cfg.cost_tolerance * max(abs(cost), 1.0):
            converged = True
            break

        accepted = False
        alpha = 1.0
        while alpha >= cfg.min_step:
            try:
                candidate, cand_cost = forward_pass(problem, Trajectory(xs, us), bp.gains, bp.feedforward, alpha)
            except NonFiniteRollout:
                cand_cost = math.inf
            if cand_cost < cost:
                decrease = cost - cand_cost
                xs, us = candidate.states, candidate.controls
                cost = cand_cost
                history.append(cost)
                jac = None
                bp_current = None
                reg = max(reg / 2.0, cfg.reg_min)
                accepted = True
                break
            alpha *= cfg.backtrack_factor

        if not accepted:
            reg *= 10.0
            if reg > cfg.reg_max:
                break
            continue
        if decrease <= cfg.cost_tolerance * max(abs(cost) + decrease, 1.0):
            converged = True
            break

    if bp_current is None:
        if jac is None:
            jac = _linearize_trajectory(problem, xs, us, cfg.fd_step)
        bp_current = _final_gains(problem, Trajectory(xs, us), jac, cfg.reg_min, cfg.reg_max)

    dt = getattr(getattr(problem.dynamics, "params", None), "dt", None)
    return Solution(
        states=xs,
        controls=us,
        gains=bp_current.gains,
        cost=cost,
        iterations=iterations,
        converged=converged,
        dt=dt,
        face_schedule=None if problem.face_schedule is None else list(problem.face_schedule),
        angular_indices=problem.angular_indices,
        cost_history=history,
    )


def feedback_control(solution: Solution, t: int, x: FloatArray) -> FloatArray:
    """Feedback law u = u_hat_t + K_t (x - x_hat_t), with the angle deviation wrapped."""
    if not 0 <= t < solution.horizon:
        raise IndexError(f"step index {t} outside horizon {solution.horizon}")
    dx = np.asarray(x, dtype=float) - solution.states[t]
    for i in solution.angular_indices:
        dx[i] = wrap_angle(dx[i])
    return solution.controls[t] + solution.gains[t] @ dx
