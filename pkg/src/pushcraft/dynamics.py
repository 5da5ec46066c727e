"""Hybrid quasi-static dynamics of a pusher-slider system.

A disc pusher moves a square slider on a plane through frictional contact.
Depending on the pusher velocity relative to the motion cone and on whether
the pusher touches a face at all, the system is in one of four interaction
modes (sticking, sliding up, sliding down, separation), each with its own
closed-form motion equation.  All quantities live in three frames: the global
frame, the initial slider frame, and a per-face frame whose +x axis points
into the slider through the touched face.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
# Pusher acceleration command [dv_normal, dv_tangential] in the initial slider frame.
ControlInput = FloatArray

TWO_PI = 2.0 * math.pi

# |p| band around the face that still counts as touching (exact equality is
# measure-zero in floating point).
CONTACT_TOL = 1e-4

_CONE_DEGENERACY_TOL = 1e-9


class DegenerateCone(ValueError):
    """Motion-cone denominator vanished; the parameters are pathological."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to [-pi, pi]; values already in range pass through bit-exact."""
    if -math.pi <= angle <= math.pi:
        return angle
    wrapped = math.fmod(angle + math.pi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    return wrapped - math.pi


def wrap_angle_array(angles: FloatArray) -> FloatArray:
    """Vectorized wrap to [-pi, pi] (in-range values unchanged)."""
    out = np.asarray(angles, dtype=float)
    mask = (out < -math.pi) | (out > math.pi)
    if not np.any(mask):
        return out
    out = out.copy()
    wrapped = np.mod(out[mask] + math.pi, TWO_PI) - math.pi
    out[mask] = wrapped
    return out


def limit_surface_constant(r_s: float) -> float:
    """Mean distance from center over a uniform-pressure square footprint of half side r_s."""
    return 2.0 * r_s * (math.sqrt(2.0) + math.asinh(1.0)) / 6.0


@dataclass(frozen=True)
class PhysicalParams:
    """Friction, limit-surface, and geometry constants of the pusher-slider pair.

    mu_p: friction coefficient pusher-slider.
    mu_g: friction coefficient slider-ground.  It scales contact forces
        uniformly and cancels out of the quasi-static velocity equations, so
        it never enters the motion model; it is kept for completeness.
    c: limit-surface constant (m).
    r_s: slider half side length (m).
    r_p: pusher radius (m).
    dt: integration step (s).
    """

    mu_p: float = 0.3
    mu_g: float = 0.35
    c: float = limit_surface_constant(0.06)
    r_s: float = 0.06
    r_p: float = 0.005
    dt: float = 0.05

    def __post_init__(self) -> None:
        if self.mu_p < 0 or self.mu_g < 0:
            raise ValueError("friction coefficients must be nonnegative")
        for name in ("c", "r_s", "r_p", "dt"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def contact_radius(self) -> float:
        """Distance from slider center to pusher center at face contact."""
        return self.r_s + self.r_p


class ContactFace(enum.Enum):
    """Square-slider face the pusher acts on, with the face-frame rotation angle.

    The face frame is rotated from the initial slider frame so that its +x
    axis points into the slider through the touched face; contact then always
    sits at p_x = -(r_s + r_p) and the mode inequalities read the same on
    every face.
    """

    LEFT = "Left"
    BOTTOM = "Bottom"
    RIGHT = "Right"
    TOP = "Top"

    @property
    def theta_f(self) -> float:
        return _FACE_ANGLE[self]


_FACE_ANGLE = {
    ContactFace.LEFT: 0.0,
    ContactFace.BOTTOM: math.pi / 2.0,
    ContactFace.RIGHT: math.pi,
    ContactFace.TOP: -math.pi / 2.0,
}

FaceSchedule = "list[ContactFace]"


class InteractionMode(enum.IntEnum):
    """Discrete contact regime; integer values index the motion-equation branch."""

    STICKING = 1
    SLIDING_UP = 2
    SLIDING_DOWN = 3
    SEPARATION = 4

    @property
    def label(self) -> str:
        return _MODE_LABEL[self]


_MODE_LABEL = {
    InteractionMode.STICKING: "Sticking",
    InteractionMode.SLIDING_UP: "SlidingUp",
    InteractionMode.SLIDING_DOWN: "SlidingDown",
    InteractionMode.SEPARATION: "Separation",
}


@dataclass(frozen=True)
class SliderPose:
    """Planar pose of the slider in the global frame."""

    x: float
    y: float
    theta: float

    def wrapped(self) -> "SliderPose":
        return SliderPose(self.x, self.y, wrap_angle(self.theta))

    def as_array(self) -> FloatArray:
        return np.array([self.x, self.y, self.theta], dtype=float)


@dataclass(frozen=True, eq=False)
class SystemState:
    """Full state: slider pose, contact point in the initial slider frame, pusher velocity.

    Packs to the 7-vector [x, y, theta, c_x, c_y, v_n, v_t] and back losslessly.
    """

    pose: SliderPose
    contact: FloatArray
    velocity: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "contact", np.asarray(self.contact, dtype=float).reshape(2))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float).reshape(2))

    def as_vector(self) -> FloatArray:
        return np.array(
            [
                self.pose.x,
                self.pose.y,
                self.pose.theta,
                self.contact[0],
                self.contact[1],
                self.velocity[0],
                self.velocity[1],
            ],
            dtype=float,
        )

    @classmethod
    def from_vector(cls, vec: FloatArray) -> "SystemState":
        v = np.asarray(vec, dtype=float).reshape(7)
        return cls(SliderPose(v[0], v[1], v[2]), v[3:5], v[5:7])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SystemState):
            return NotImplemented
        return bool(np.array_equal(self.as_vector(), other.as_vector()))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())))


@dataclass(frozen=True)
class MotionConeBounds:
    """Tangential/normal velocity-ratio slopes bounding the sticking cone."""

    gamma_up: float
    gamma_dn: float


def rotation2(angle: float) -> FloatArray:
    """2x2 rotation matrix for the given angle."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def face_frame_contact(state: SystemState, face: ContactFace) -> tuple[float, float]:
    """Contact point expressed in the face frame."""
    cf, sf = math.cos(face.theta_f), math.sin(face.theta_f)
    cx, cy = float(state.contact[0]), float(state.contact[1])
    return (cf * cx + sf * cy, -sf * cx + cf * cy)


def _cone_terms(px: float, py: float, mu_p: float, c: float) -> tuple[float, float, float, float]:
    """Numerators/denominators of the cone slopes, division-free."""
    c2 = c * c
    num_up = mu_p * c2 - px * py + mu_p * px * px
    den_up = c2 + py * py - mu_p * px * py
    num_dn = -mu_p * c2 - px * py - mu_p * px * px
    den_dn = c2 + py * py + mu_p * px * py
    return num_up, den_up, num_dn, den_dn


def motion_cone_bounds(p_face: FloatArray, params: PhysicalParams) -> MotionConeBounds:
    """Cone slope bounds at a face-frame contact point.

    Raises:
        DegenerateCone: if either slope denominator is smaller than 1e-9 in
            magnitude, which signals pathological friction/geometry values.
    """
    px, py = float(p_face[0]), float(p_face[1])
    num_up, den_up, num_dn, den_dn = _cone_terms(px, py, params.mu_p, params.c)
    if abs(den_up) < _CONE_DEGENERACY_TOL or abs(den_dn) < _CONE_DEGENERACY_TOL:
        raise DegenerateCone(f"cone denominators ({den_up:.3e}, {den_dn:.3e}) below tolerance")
    return MotionConeBounds(gamma_up=num_up / den_up, gamma_dn=num_dn / den_dn)


def _classify_scalar(
    px: float,
    py: float,
    vnf: float,
    vtf: float,
    mu_p: float,
    c: float,
    r_contact: float,
    r_s: float,
) -> int:
    # Separation first: not approaching, or off the face band.
    if vnf <= 0.0 or abs(px) > r_contact + CONTACT_TOL or abs(py) > r_s + CONTACT_TOL:
        return 4
    num_up, den_up, num_dn, den_dn = _cone_terms(px, py, mu_p, c)
    # Ratio tests in cross-multiplied form; sign of the denominator decides
    # the comparison direction so no division ever happens.
    above_up = vtf * den_up > num_up * vnf if den_up > 0.0 else vtf * den_up < num_up * vnf
    if above_up:
        return 2
    below_dn = vtf * den_dn < num_dn * vnf if den_dn > 0.0 else vtf * den_dn > num_dn * vnf
    if below_dn:
        return 3
    return 1


def classify_mode(state: SystemState, face: ContactFace, params: PhysicalParams) -> InteractionMode:
    """Decide the interaction mode for a state/face pair.

    Total function: separation wins whenever the pusher is off the face band
    or not moving into it (v_nf <= 0); otherwise the face-frame velocity is
    tested against the motion cone.
    """
    px, py = face_frame_contact(state, face)
    cf, sf = math.cos(face.theta_f), math.sin(face.theta_f)
    vx, vy = float(state.velocity[0]), float(state.velocity[1])
    vnf = cf * vx + sf * vy
    vtf = -sf * vx + cf * vy
    mode = _classify_scalar(px, py, vnf, vtf, params.mu_p, params.c, params.contact_radius, params.r_s)
    return InteractionMode(mode)


def _gamma(px: float, py: float, mu_p: float, c: float, up: bool) -> float:
    num_up, den_up, num_dn, den_dn = _cone_terms(px, py, mu_p, c)
    num, den = (num_up, den_up) if up else (num_dn, den_dn)
    if abs(den) < _CONE_DEGENERACY_TOL:
        raise DegenerateCone(f"cone denominator {den:.3e} below tolerance")
    return num / den


def _derivative_scalar(
    x: tuple[float, ...],
    u0: float,
    u1: float,
    theta_f: float,
    mode: int,
    mu_p: float,
    c: float,
) -> tuple[float, float, float, float, float, float, float]:
    """7-vector time derivative for a fixed mode; pure-float hot path."""
    if mode == 4:
        # P_4 = 0 and b_4 = 0 freeze the slider; the contact point follows the
        # pusher velocity exactly (R_f I R_f^T v = v).
        return (0.0, 0.0, 0.0, x[5], x[6], u0, u1)

    cf, sf = math.cos(theta_f), math.sin(theta_f)
    px = cf * x[3] + sf * x[4]
    py = -sf * x[3] + cf * x[4]
    vnf = cf * x[5] + sf * x[6]
    vtf = -sf * x[5] + cf * x[6]
    c2 = c * c
    denom = c2 + px * px + py * py

    if mode == 1:
        eff_t = vtf
        omega = (-py * vnf + px * vtf) / denom
        drift_t = 0.0
    else:
        gamma = _gamma(px, py, mu_p, c, up=(mode == 2))
        eff_t = gamma * vnf
        omega = ((-py + gamma * px) * vnf) / denom
        drift_t = vtf - gamma * vnf

    # Slider translation: R_f R_theta Q P_j v_f, with Q P_j v_f = Q (vnf, eff_t).
    wn = ((c2 + px * px) * vnf + px * py * eff_t) / denom
    wt = (px * py * vnf + (c2 + py * py) * eff_t) / denom
    a = theta_f + x[2]
    ca, sa = math.cos(a), math.sin(a)
    dx = ca * wn - sa * wt
    dy = sa * wn + ca * wt

    # Contact drift (tangential only in sliding modes), rotated back to the
    # initial slider frame.
    dcx = -sf * drift_t
    dcy = cf * drift_t
    return (dx, dy, omega, dcx, dcy, u0, u1)


def state_derivative(
    state: SystemState,
    u: ControlInput,
    face: ContactFace,
    mode: InteractionMode,
    params: PhysicalParams,
) -> FloatArray:
    """Time derivative of the 7-vector state under the given interaction mode.

    The caller is responsible for passing a mode consistent with
    classify_mode; mismatched modes are evaluated as requested (the solver
    relies on this to freeze modes while differencing).
    """
    x = tuple(float(v) for v in state.as_vector())
    d = _derivative_scalar(x, float(u[0]), float(u[1]), face.theta_f, int(mode), params.mu_p, params.c)
    return np.array(d)


def step_vector(
    x: FloatArray,
    u: ControlInput,
    face: ContactFace,
    params: PhysicalParams,
) -> tuple[FloatArray, InteractionMode]:
    """One explicit-Euler step of the raw 7-vector; mode classified at the start state."""
    xt = (float(x[0]), float(x[1]), float(x[2]), float(x[3]), float(x[4]), float(x[5]), float(x[6]))
    theta_f = face.theta_f
    cf, sf = math.cos(theta_f), math.sin(theta_f)
    px = cf * xt[3] + sf * xt[4]
    py = -sf * xt[3] + cf * xt[4]
    vnf = cf * xt[5] + sf * xt[6]
    vtf = -sf * xt[5] + cf * xt[6]
    mode = _classify_scalar(px, py, vnf, vtf, params.mu_p, params.c, params.contact_radius, params.r_s)
    u0, u1 = float(u[0]), float(u[1])
    d = _derivative_scalar(xt, u0, u1, theta_f, mode, params.mu_p, params.c)
    dt = params.dt
    nxt = np.array(
        [
            xt[0] + dt * d[0],
            xt[1] + dt * d[1],
            wrap_angle(xt[2] + dt * d[2]),
            xt[3] + dt * d[3],
            xt[4] + dt * d[4],
            xt[5] + dt * d[5],
            xt[6] + dt * d[6],
        ]
    )
    return nxt, InteractionMode(mode)


def step(
    state: SystemState,
    u: ControlInput,
    face: ContactFace,
    params: PhysicalParams,
) -> tuple[SystemState, InteractionMode]:
    """Advance the system by one integration step; returns the mode that governed it."""
    nxt, mode = step_vector(state.as_vector(), u, face, params)
    return SystemState.from_vector(nxt), mode


# ---------------------------------------------------------------------------
# Vectorized kernels (used by the solver's finite-difference linearization and
# by the property suite; numerically identical to the scalar path).
# ---------------------------------------------------------------------------


def classify_batch(xs: FloatArray, theta_f: FloatArray, params: PhysicalParams) -> FloatArray:
    """Interaction-mode integers for a batch of states; theta_f per row."""
    xs = np.asarray(xs, dtype=float)
    cf, sf = np.cos(theta_f), np.sin(theta_f)
    px = cf * xs[:, 3] + sf * xs[:, 4]
    py = -sf * xs[:, 3] + cf * xs[:, 4]
    vnf = cf * xs[:, 5] + sf * xs[:, 6]
    vtf = -sf * xs[:, 5] + cf * xs[:, 6]

    c2 = params.c * params.c
    mu = params.mu_p
    num_up = mu * c2 - px * py + mu * px * px
    den_up = c2 + py * py - mu * px * py
    num_dn = -mu * c2 - px * py - mu * px * px
    den_dn = c2 + py * py + mu * px * py

    sep = (
        (vnf <= 0.0)
        | (np.abs(px) > params.contact_radius + CONTACT_TOL)
        | (np.abs(py) > params.r_s + CONTACT_TOL)
    )
    lhs_up, rhs_up = vtf * den_up, num_up * vnf
    above = np.where(den_up > 0.0, lhs_up > rhs_up, lhs_up < rhs_up)
    lhs_dn, rhs_dn = vtf * den_dn, num_dn * vnf
    below = np.where(den_dn > 0.0, lhs_dn < rhs_dn, lhs_dn > rhs_dn)

    modes = np.ones(len(xs), dtype=np.int64)
    modes[below] = 3
    modes[above] = 2
    modes[sep] = 4
    return modes


def derivative_batch(
    xs: FloatArray,
    us: FloatArray,
    theta_f: FloatArray,
    modes: FloatArray,
    params: PhysicalParams,
) -> FloatArray:
    """Batch of 7-vector derivatives; each row evaluated under its own frozen mode."""
    xs = np.asarray(xs, dtype=float)
    us = np.asarray(us, dtype=float)
    modes = np.asarray(modes)
    n = len(xs)
    out = np.zeros((n, 7))
    out[:, 5:7] = us

    cf, sf = np.cos(theta_f), np.sin(theta_f)
    px = cf * xs[:, 3] + sf * xs[:, 4]
    py = -sf * xs[:, 3] + cf * xs[:, 4]
    vnf = cf * xs[:, 5] + sf * xs[:, 6]
    vtf = -sf * xs[:, 5] + cf * xs[:, 6]

    c2 = params.c * params.c
    mu = params.mu_p
    denom = c2 + px * px + py * py

    contact = modes != 4
    sliding_up = modes == 2
    sliding_dn = modes == 3
    sliding = sliding_up | sliding_dn

    gamma = np.zeros(n)
    if np.any(sliding):
        num_up = mu * c2 - px * py + mu * px * px
        den_up = c2 + py * py - mu * px * py
        num_dn = -mu * c2 - px * py - mu * px * px
        den_dn = c2 + py * py + mu * px * py
        bad = (sliding_up & (np.abs(den_up) < _CONE_DEGENERACY_TOL)) | (
            sliding_dn & (np.abs(den_dn) < _CONE_DEGENERACY_TOL)
        )
        if np.any(bad):
            raise DegenerateCone("cone denominator below tolerance in batch evaluation")
        gamma[sliding_up] = (num_up / den_up)[sliding_up]
        gamma[sliding_dn] = (num_dn / den_dn)[sliding_dn]

    eff_t = np.where(sliding, gamma * vnf, vtf)
    omega = np.where(
        sliding,
        ((-py + gamma * px) * vnf) / denom,
        (-py * vnf + px * vtf) / denom,
    )
    drift_t = np.where(sliding, vtf - gamma * vnf, 0.0)

    wn = ((c2 + px * px) * vnf + px * py * eff_t) / denom
    wt = (px * py * vnf + (c2 + py * py) * eff_t) / denom
    a = theta_f + xs[:, 2]
    ca, sa = np.cos(a), np.sin(a)

    out[contact, 0] = (ca * wn - sa * wt)[contact]
    out[contact, 1] = (sa * wn + ca * wt)[contact]
    out[contact, 2] = omega[contact]
    out[contact, 3] = (-sf * drift_t)[contact]
    out[contact, 4] = (cf * drift_t)[contact]

    separated = ~contact
    out[separated, 3] = xs[separated, 5]
    out[separated, 4] = xs[separated, 6]
    return out


def step_batch_frozen(
    xs: FloatArray,
    us: FloatArray,
    theta_f: FloatArray,
    modes: FloatArray,
    params: PhysicalParams,
) -> FloatArray:
    """Euler step of a batch with frozen modes and no angle wrap.

    Used for finite differencing: the wrap is withheld so the map stays
    smooth, and the frozen mode keeps every perturbed evaluation on the same
    branch of the motion equation.
    """
    return xs + params.dt * derivative_batch(xs, us, theta_f, modes, params)
