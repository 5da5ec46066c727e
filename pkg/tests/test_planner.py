import math

import numpy as np
import pytest

from pushcraft.ddp import SolverConfig
from pushcraft.demos import DemoLibrary, EmptyLibrary, build_canonical_library, resample
from pushcraft.dynamics import ContactFace, InteractionMode, SliderPose, classify_mode
from pushcraft.planner import (
    CostWeights,
    PlanMethod,
    PlanRequest,
    build_cost_c1,
    build_cost_c2,
    centered_contact,
    evaluate_success,
    initial_state,
    plan,
    soft_threshold,
)


@pytest.fixture(scope="module")
def library(params):
    return build_canonical_library(params)


@pytest.fixture(scope="module")
def fast_solver():
    return SolverConfig(max_iterations=150)


# ---------------------------------------------------------------------------
# Cost pieces
# ---------------------------------------------------------------------------


def test_soft_threshold_inside_box_is_zero():
    u_l = np.array([0.5, 0.5])
    assert np.array_equal(soft_threshold(np.array([0.3, -0.5]), u_l), np.zeros(2))


def test_soft_threshold_linear_excess():
    u_l = np.array([0.5, 0.5])
    out = soft_threshold(np.array([0.6, -0.75]), u_l)
    assert abs(out[0] - 0.1) < 1e-15
    assert abs(out[1] + 0.25) < 1e-15


def test_soft_threshold_odd_symmetry(rng):
    u_l = np.array([0.5, 0.5])
    for _ in range(100):
        u = rng.uniform(-2, 2, size=2)
        assert np.allclose(soft_threshold(-u, u_l), -soft_threshold(u, u_l), atol=1e-15)


def test_c1_zero_at_anchor(params):
    weights = CostWeights.default()
    target = SliderPose(0.1, -0.05, 0.3)
    stage, terminal = build_cost_c1(target, weights, ContactFace.LEFT, params=params)
    mu = terminal.mu
    assert terminal.value(mu) == 0.0
    assert stage.value(mu, np.zeros(2), 0) == 0.0


def test_c1_doubling_terminal_weight_doubles_cost(params):
    target = SliderPose(0.1, -0.05, 0.3)
    w1 = CostWeights.default()
    w2 = CostWeights(
        q_terminal=2 * w1.q_terminal,
        q_switch=w1.q_switch,
        r_control=w1.r_control,
        q_bound=w1.q_bound,
        r_demo_vel=w1.r_demo_vel,
        r_demo_acc=w1.r_demo_acc,
        u_limit=w1.u_limit,
    )
    _, t1 = build_cost_c1(target, w1, ContactFace.LEFT, params=params)
    _, t2 = build_cost_c1(target, w2, ContactFace.LEFT, params=params)
    x = np.array([0.2, 0.1, -0.4, -0.06, 0.01, 0.02, -0.01])
    assert abs(t2.value(x) - 2 * t1.value(x)) < 1e-9 * max(1.0, t1.value(x))


def test_terminal_contact_weights_follow_face_orientation(params):
    weights = CostWeights.default()
    target = SliderPose(0.0, 0.0, 0.0)
    _, term_left = build_cost_c1(target, weights, ContactFace.LEFT, params=params)
    _, term_top = build_cost_c1(target, weights, ContactFace.TOP, params=params)
    # theta_f in {0, pi}: contact rows weigh (1e7, 10); otherwise swapped.
    assert term_left.qt[3] == 1e7 and term_left.qt[4] == 10.0
    assert term_top.qt[3] == 10.0 and term_top.qt[4] == 1e7
    assert np.array_equal(term_left.qt[:3], [1e6, 1e6, 1e6])
    assert np.array_equal(term_left.qt[5:], [1e3, 1e3])


def test_c2_demo_following_terms_vanish_on_demo(params, library):
    # On the demo's own trajectory, the velocity and acceleration tethers are
    # exactly zero and the switch viapoints reduce to the contact-row term
    # that anchors where the new face is engaged.
    weights = CostWeights.default()
    for demo in library.demos:
        demo_r = resample(demo, 200)
        target = demo_r.reached
        stage2, term2 = build_cost_c2(target, demo_r, weights, params)
        stage1, term1 = build_cost_c1(
            target, weights, demo_r.faces[-1], contact_anchor=demo_r.states[-1, 3:5]
        )
        xs, us = demo_r.states, demo_r.controls
        c1_total = sum(stage1.value(xs[t], us[t], t) for t in range(200)) + term1.value(xs[-1])
        c2_total = sum(stage2.value(xs[t], us[t], t) for t in range(200)) + term2.value(xs[-1])
        residual = c2_total - c1_total
        expected = 0.0
        for t, (mu, qn) in stage2.viapoints.items():
            res = xs[t] - mu
            expected += float(res @ (qn * res))
        assert residual >= -1e-9
        assert abs(residual - expected) < 1e-9 * max(1.0, expected)
        if demo.n_switches == 0:
            assert residual == 0.0


def test_c2_zero_switch_demo_has_no_viapoints(params, library):
    demo = resample(library.demos[0], 200)
    stage, _ = build_cost_c2(demo.reached, demo, CostWeights.default(), params)
    assert stage.viapoints == {}


def test_default_weights_match_experiment_values():
    w = CostWeights.default()
    assert np.array_equal(w.r_demo_vel, [100.0, 100.0])
    assert np.array_equal(w.r_demo_acc, [100.0, 100.0])
    assert np.array_equal(w.r_control, [1.0, 1.0])
    assert np.array_equal(w.q_switch[:3], [1e3, 1e3, 1e3])
    assert w.q_switch[3] == 1e6 and w.q_switch[4] == 0.0


# ---------------------------------------------------------------------------
# Initial state
# ---------------------------------------------------------------------------


def test_initial_state_left_face(params):
    s = initial_state(ContactFace.LEFT, params)
    assert abs(s.contact[0] + 1.3 * params.contact_radius) < 1e-15
    assert abs(s.contact[1]) < 1e-15
    assert np.allclose(s.contact, [-0.0845, 0.0], atol=1e-12)
    assert classify_mode(s, ContactFace.LEFT, params) == InteractionMode.SEPARATION


def test_initial_state_top_face(params):
    s = initial_state(ContactFace.TOP, params)
    assert np.allclose(s.contact, [0.0, 0.0845], atol=1e-12)
    assert classify_mode(s, ContactFace.TOP, params) == InteractionMode.SEPARATION


def test_initial_state_separation_all_faces(params):
    for face in ContactFace:
        s = initial_state(face, params)
        assert classify_mode(s, face, params) == InteractionMode.SEPARATION


# ---------------------------------------------------------------------------
# Success predicate
# ---------------------------------------------------------------------------


def test_evaluate_success_cases():
    assert evaluate_success((0.005, 0.005, 0.03))
    assert not evaluate_success((0.012, 0.0, 0.0))
    assert not evaluate_success((0.01, 0.009, 0.08))  # x exactly at threshold: strict
    assert not evaluate_success((0.009, 0.009, math.radians(5.0)))


def test_evaluate_success_rejects_negative():
    with pytest.raises(ValueError):
        evaluate_success((-0.001, 0.0, 0.0))


# ---------------------------------------------------------------------------
# Planning methods (end to end)
# ---------------------------------------------------------------------------


def test_plan_request_validates_task_space(library):
    with pytest.raises(ValueError, match="task space"):
        PlanRequest(target=SliderPose(0.3, 0.0, 0.0), method="zs")


def test_plan_demo_methods_require_library():
    with pytest.raises(EmptyLibrary):
        plan(PlanRequest(target=SliderPose(0.1, 0.0, 0.0), method="ds", library=DemoLibrary()))


def test_zs_pure_translation_succeeds(params, fast_solver):
    report = plan(
        PlanRequest(target=SliderPose(0.10, 0.0, 0.0), method="zs", solver=fast_solver)
    )
    assert report.success
    assert report.demo_index is None


def test_ds_succeeds_on_demo_endpoint(params, library, fast_solver):
    target = library.demos[0].reached
    report = plan(
        PlanRequest(target=target, method="ds", library=library, solver=fast_solver)
    )
    assert report.success
    assert report.demo_index == 0


def test_ws_runs_dp_first_and_seeds_from_it(params, library, fast_solver):
    target = SliderPose(0.0, -0.20, math.pi / 2)
    report = plan(
        PlanRequest(target=target, method="ws", library=library, solver=fast_solver)
    )
    assert report.method == PlanMethod.WS
    assert report.warm_start is not None
    assert report.warm_start.method == PlanMethod.DP
    assert report.warm_start.demo_index == report.demo_index
    assert report.solution.face_schedule == report.warm_start.solution.face_schedule
    assert report.success


def test_report_errors_match_recomputation(params, library, fast_solver):
    target = SliderPose(0.12, -0.08, -1.2)
    report = plan(
        PlanRequest(target=target, method="ws", library=library, solver=fast_solver)
    )
    final = report.solution.states[-1]
    assert abs(report.x_err - abs(final[0] - target.x)) < 1e-15
    assert abs(report.y_err - abs(final[1] - target.y)) < 1e-15
    assert report.success == evaluate_success(report.errors)


def test_ws_cost_not_worse_than_dp_on_reaching_objective(params, library, fast_solver):
    # The warm-started solve optimizes the plain reaching cost from DP's
    # controls, so its objective cannot end above DP's reaching component.
    target = SliderPose(0.0, -0.20, math.pi / 2)
    report = plan(
        PlanRequest(target=target, method="ws", library=library, solver=fast_solver)
    )
    dp_solution = report.warm_start.solution
    stage, terminal = build_cost_c1(
        target,
        CostWeights.default(),
        dp_solution.face_schedule[-1],
        contact_anchor=dp_solution.states[-1][3:5],
    )
    dp_c1 = sum(
        stage.value(dp_solution.states[t], dp_solution.controls[t], t)
        for t in range(dp_solution.horizon)
    ) + terminal.value(dp_solution.states[-1])
    assert report.solution.cost <= dp_c1 + 1e-8


def test_plan_deterministic(params, library, fast_solver):
    target = SliderPose(-0.05, -0.15, 2.0)
    r1 = plan(PlanRequest(target=target, method="dp", library=library, solver=fast_solver))
    r2 = plan(PlanRequest(target=target, method="dp", library=library, solver=fast_solver))
    assert np.array_equal(r1.solution.states, r2.solution.states)
    assert np.array_equal(r1.solution.controls, r2.solution.controls)
    assert r1.solution.cost == r2.solution.cost


def test_plan_report_round_trip(tmp_path, params, library, fast_solver):
    report = plan(
        PlanRequest(
            target=SliderPose(0.1, 0.0, 0.0), method="ws", library=library, solver=fast_solver
        )
    )
    path = tmp_path / "report.json"
    report.save(path)
    import json

    doc = json.loads(path.read_text())
    assert doc["method"] == "ws"
    assert doc["success"] == report.success
    assert doc["warm_start"]["method"] == "dp"
