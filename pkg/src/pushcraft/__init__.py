"""Trajectory optimization for long-horizon planar pushing with face switching."""

from .ddp import OcpProblem, Solution, SolverConfig, feedback_control, solve
from .demos import (
    DemoLibrary,
    Demonstration,
    build_canonical_library,
    load_demo,
    save_demo,
    select_demo,
    synthesize_demo,
)
from .dynamics import (
    ContactFace,
    InteractionMode,
    PhysicalParams,
    SliderPose,
    SystemState,
    classify_mode,
    motion_cone_bounds,
    state_derivative,
    step,
)
from .planner import CostWeights, PlanMethod, PlanRequest, evaluate_success, initial_state, plan
from .tracking import DisturbanceModel, TrackingConfig, disturbance_sweep, track

__all__ = [
    "ContactFace",
    "CostWeights",
    "DemoLibrary",
    "Demonstration",
    "DisturbanceModel",
    "InteractionMode",
    "OcpProblem",
    "PhysicalParams",
    "PlanMethod",
    "PlanRequest",
    "SliderPose",
    "Solution",
    "SolverConfig",
    "SystemState",
    "TrackingConfig",
    "build_canonical_library",
    "classify_mode",
    "disturbance_sweep",
    "evaluate_success",
    "feedback_control",
    "initial_state",
    "load_demo",
    "motion_cone_bounds",
    "plan",
    "save_demo",
    "select_demo",
    "solve",
    "state_derivative",
    "step",
    "synthesize_demo",
    "track",
]

__version__ = "0.1.0"
