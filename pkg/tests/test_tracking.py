import math

import numpy as np
import pytest

from pushcraft.dynamics import PhysicalParams
from pushcraft.tracking import (
    DisturbanceModel,
    TrackingConfig,
    disturbance_sweep,
    sample_disturbance,
    track,
    trust_region_filter,
    within_tracking_tolerance,
    write_sweep_csv,
)

PAPER_BOUNDS = DisturbanceModel(0.04, 0.04, 0.117, seed=0)


# ---------------------------------------------------------------------------
# Disturbance sampling
# ---------------------------------------------------------------------------


def test_zero_bounds_give_zero_perturbation():
    model = DisturbanceModel(0.0, 0.0, 0.0, seed=3)
    for t in range(20):
        assert np.array_equal(sample_disturbance(model, t), np.zeros(3))


def test_sampling_deterministic_per_seed_and_step():
    model = DisturbanceModel(0.04, 0.02, 0.1, seed=11)
    a = sample_disturbance(model, 7)
    b = sample_disturbance(model, 7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_disturbance(model, 8))
    other = DisturbanceModel(0.04, 0.02, 0.1, seed=12)
    assert not np.array_equal(a, sample_disturbance(other, 7))


def test_sampling_statistics():
    model = DisturbanceModel(0.04, 0.04, 0.117, seed=5)
    draws = np.array([sample_disturbance(model, t) for t in range(100_000)])
    assert np.all(np.abs(draws[:, 0]) <= 0.04)
    assert np.all(np.abs(draws[:, 2]) <= 0.117)
    # Mean of U(-b, b) has std b/sqrt(3n); check within 3 sigma.
    for j, b in enumerate((0.04, 0.04, 0.117)):
        assert abs(draws[:, j].mean()) < 3 * b / math.sqrt(3 * len(draws))


def test_disturbance_model_rejects_negative_bounds():
    with pytest.raises(ValueError):
        DisturbanceModel(-0.01, 0, 0, 0)


# ---------------------------------------------------------------------------
# Trust region filter
# ---------------------------------------------------------------------------


def test_filter_returns_planned_at_zero_deviation(rng):
    x = rng.uniform(-1, 1, size=7)
    out = trust_region_filter(x.copy(), x, 0.1)
    assert np.array_equal(out, x)


def test_filter_returns_actual_outside_ball(rng):
    planned = np.zeros(7)
    actual = np.zeros(7)
    actual[0] = 0.2  # twice the radius
    out = trust_region_filter(actual, planned, 0.1)
    assert out is actual


def test_filter_boundary_is_strict():
    planned = np.zeros(7)
    actual = np.zeros(7)
    actual[1] = 0.1
    out = trust_region_filter(actual, planned, 0.1)
    assert out is actual  # norm == r: the strict < test fails, keep actual


def test_filter_output_is_one_of_inputs(rng):
    for _ in range(100):
        planned = rng.uniform(-1, 1, size=7)
        actual = planned + rng.uniform(-0.2, 0.2, size=7)
        out = trust_region_filter(actual, planned, 0.15)
        assert out is planned or out is actual


def test_filter_wraps_theta_difference():
    planned = np.zeros(7)
    planned[2] = math.pi - 0.01
    actual = np.zeros(7)
    actual[2] = -math.pi + 0.01
    # Raw difference is ~2 pi, wrapped it is 0.02: inside the ball.
    out = trust_region_filter(actual, planned, 0.1)
    assert out is planned


# ---------------------------------------------------------------------------
# Closed-loop tracking
# ---------------------------------------------------------------------------


def test_zero_disturbance_replay_is_feedforward_exact(one_switch_plan):
    trace = track(one_switch_plan.solution, DisturbanceModel(0, 0, 0, 0))
    assert np.array_equal(trace.controls, one_switch_plan.solution.controls)
    assert trace.final_errors[0] < 1e-3
    assert trace.final_errors[1] < 1e-3
    assert trace.final_errors[2] < 1e-3
    assert trace.within_tolerance


def test_trace_deterministic(one_switch_plan):
    t1 = track(one_switch_plan.solution, PAPER_BOUNDS)
    t2 = track(one_switch_plan.solution, PAPER_BOUNDS)
    assert np.array_equal(t1.final_state, t2.final_state)
    assert np.array_equal(t1.controls, t2.controls)


def test_tolerance_flag_matches_recomputation(one_switch_plan):
    for seed in range(5):
        trace = track(one_switch_plan.solution, DisturbanceModel(0.04, 0.04, 0.117, seed))
        assert trace.within_tolerance == within_tracking_tolerance(trace.final_errors)
        ex, ey, eth = trace.final_errors
        assert trace.within_tolerance == (ex < 0.03 and ey < 0.03 and eth < math.radians(5))


def test_paper_disturbance_mostly_within_tolerance(one_switch_plan):
    wins = sum(
        track(one_switch_plan.solution, DisturbanceModel(0.04, 0.04, 0.117, seed)).within_tolerance
        for seed in range(10)
    )
    assert wins >= 9


def test_filtered_state_is_planned_or_measured(one_switch_plan):
    # Small radius forces the measured branch under disturbance.
    cfg = TrackingConfig(trust_radius=1e-6)
    trace = track(one_switch_plan.solution, DisturbanceModel(0.01, 0.01, 0.01, 1), cfg)
    used_measured = 0
    for t in range(len(trace.controls)):
        same_planned = np.array_equal(trace.filtered[t], trace.planned[t])
        same_measured = np.array_equal(trace.filtered[t], trace.measured[t])
        assert same_planned or same_measured
        used_measured += same_measured and not same_planned
    assert used_measured > 0


def test_friction_mismatch_still_within_tolerance(one_switch_plan):
    # mu_g scales forces uniformly and cancels out of the velocity-level
    # model, so this mismatch is exactly neutral; mu_p changes the motion
    # cone and genuinely perturbs the plant.
    for mismatched in (PhysicalParams(mu_g=0.40), PhysicalParams(mu_p=0.36)):
        cfg = TrackingConfig(plant_params=mismatched)
        trace = track(one_switch_plan.solution, DisturbanceModel(0, 0, 0, 0), cfg)
        assert trace.within_tolerance


def test_sweep_shape_and_zero_point(one_switch_plan, tmp_path):
    bounds = [(0.0, 0.0), (0.02, 0.06), (0.04, 0.117)]
    rows = disturbance_sweep(one_switch_plan.solution, bounds, seeds=[0, 1, 2])
    assert len(rows) == len(bounds)
    assert rows[0]["mean_x_err"] < 1e-3 and rows[0]["max_theta_err"] < 1e-3
    assert rows[0]["success_fraction"] == 1.0
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rows, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == len(bounds) + 1
    assert lines[0].startswith("x_M,y_M,theta_M,seed_count")


def test_sweep_aggregate_errors_non_decreasing(one_switch_plan):
    bounds = [(0.0, 0.0), (0.02, 0.06), (0.04, 0.117), (0.06, 0.18), (0.08, 0.24)]
    rows = disturbance_sweep(one_switch_plan.solution, bounds, seeds=list(range(6)))
    agg = [r["mean_x_err"] + r["mean_y_err"] + r["mean_theta_err"] for r in rows]
    slack = 1e-9
    for prev, cur in zip(agg, agg[1:]):
        assert cur >= prev - slack
