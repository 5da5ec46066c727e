import math

import numpy as np
import pytest

from pushcraft.ddp import SolverConfig
from pushcraft.demos import build_canonical_library
from pushcraft.dynamics import PhysicalParams, SliderPose


@pytest.fixture(scope="session")
def params() -> PhysicalParams:
    return PhysicalParams()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def canonical_library(params):
    return build_canonical_library(params)


@pytest.fixture(scope="session")
def one_switch_plan(params, canonical_library):
    """Warm-started plan for the one-switch disturbance-study task."""
    from pushcraft.planner import PlanRequest, plan

    report = plan(
        PlanRequest(
            target=SliderPose(0.0, -0.20, math.pi / 2),
            method="ws",
            library=canonical_library,
            solver=SolverConfig(max_iterations=150),
        )
    )
    assert report.success
    return report
