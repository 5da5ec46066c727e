import numpy as np
import pytest
from fastapi.testclient import TestClient

from pushcraft.ddp import SolverConfig
from pushcraft.demos import DemoLibrary, load_demo, select_demo
from pushcraft.planner import PlanRequest, plan
from pushcraft.service import create_app


@pytest.fixture()
def service(tmp_path, params):
    app = create_app(tmp_path / "demos", params)
    with TestClient(app) as client:
        yield client, tmp_path / "demos"


def drive_stream(client, session_id, demo):
    """Replay a demonstration's velocity stream through the service."""
    switch_at = {t: demo.faces[t] for t in demo.switch_times}
    last = None
    for t in range(demo.horizon):
        if t in switch_at:
            r = client.post(f"/session/{session_id}/switch-face", json={"face": switch_at[t].value})
            assert r.status_code == 200, r.text
        v_cmd = demo.states[t + 1, 5:7].tolist()
        last = client.post(f"/session/{session_id}/step", json={"v_cmd": v_cmd})
        assert last.status_code == 200, last.text
    return last.json()


def test_session_lifecycle(service, params):
    client, _ = service
    r = client.post("/session", json={"face": "Left"})
    assert r.status_code == 200
    doc = r.json()
    assert doc["face"] == "Left"
    assert doc["mode"] == "Separation"
    assert np.allclose(doc["state"], [0, 0, 0, -1.3 * params.contact_radius, 0, 0, 0])

    r = client.post(f"/session/{doc['id']}/step", json={"v_cmd": [0.05, 0.0]})
    assert r.status_code == 200
    stepped = r.json()
    assert stepped["steps"] == 1
    assert stepped["state"][5] == pytest.approx(0.05)

    r = client.delete(f"/session/{doc['id']}")
    assert r.status_code == 204
    r = client.post(f"/session/{doc['id']}/step", json={"v_cmd": [0.0, 0.0]})
    assert r.status_code == 404


def test_switch_face_requires_separation(service):
    client, _ = service
    sid = client.post("/session", json={"face": "Left"}).json()["id"]
    # Drive into the face until sticking.
    mode = None
    for _ in range(40):
        mode = client.post(f"/session/{sid}/step", json={"v_cmd": [0.08, 0.0]}).json()["mode"]
        if mode == "Sticking":
            break
    assert mode == "Sticking"
    r = client.post(f"/session/{sid}/switch-face", json={"face": "Top"})
    assert r.status_code == 409

    # Pull away, then the switch is allowed.
    for _ in range(10):
        mode = client.post(f"/session/{sid}/step", json={"v_cmd": [-0.08, 0.0]}).json()["mode"]
    assert mode == "Separation"
    r = client.post(f"/session/{sid}/switch-face", json={"face": "Top"})
    assert r.status_code == 200
    assert r.json()["face"] == "Top"


def test_unknown_face_rejected(service):
    client, _ = service
    sid = client.post("/session", json={"face": "Left"}).json()["id"]
    r = client.post(f"/session/{sid}/switch-face", json={"face": "Diagonal"})
    assert r.status_code == 422


def test_finish_requires_steps(service):
    client, _ = service
    sid = client.post("/session", json={"face": "Left"}).json()["id"]
    r = client.post(f"/session/{sid}/finish", json={"label": "empty"})
    assert r.status_code == 400


def test_recorded_demo_is_valid_and_listed(service, canonical_library):
    client, demo_dir = service
    demo = canonical_library.demos[1]
    sid = client.post("/session", json={"face": demo.faces[0].value}).json()["id"]
    drive_stream(client, sid, demo)
    r = client.post(f"/session/{sid}/finish", json={"label": "replayed"})
    assert r.status_code == 200
    payload = r.json()
    assert payload["switches"] == demo.n_switches

    stored = load_demo(demo_dir / f"{payload['demo_id']}.json")
    stored.validate()
    assert stored.label == "replayed"
    # The velocity stream reproduces the scripted push up to float round-off.
    assert np.allclose(stored.states[-1], demo.states[-1], atol=1e-9)

    listing = client.get("/demos").json()
    assert [e["id"] for e in listing] == [payload["demo_id"]]
    assert listing[0]["switches"] == demo.n_switches
    doc = client.get(f"/demos/{payload['demo_id']}").json()
    assert doc == stored.to_json_dict()


def test_replay_is_bit_identical(service, canonical_library):
    client, demo_dir = service
    demo = canonical_library.demos[1]
    ids = []
    for _ in range(2):
        sid = client.post("/session", json={"face": demo.faces[0].value}).json()["id"]
        drive_stream(client, sid, demo)
        ids.append(client.post(f"/session/{sid}/finish", json={"label": "x"}).json()["demo_id"])
    a = load_demo(demo_dir / f"{ids[0]}.json")
    b = load_demo(demo_dir / f"{ids[1]}.json")
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.controls, b.controls)
    assert a.faces == b.faces


def test_sessions_are_isolated(service):
    client, _ = service
    sid_a = client.post("/session", json={"face": "Left"}).json()["id"]
    sid_b = client.post("/session", json={"face": "Left"}).json()["id"]

    # Interleaved stepping of two sessions...
    inter_a = inter_b = None
    for t in range(30):
        inter_a = client.post(f"/session/{sid_a}/step", json={"v_cmd": [0.06, 0.01]}).json()
        inter_b = client.post(f"/session/{sid_b}/step", json={"v_cmd": [0.03, -0.02]}).json()

    # ...equals stepping each one alone.
    sid_c = client.post("/session", json={"face": "Left"}).json()["id"]
    for t in range(30):
        solo_a = client.post(f"/session/{sid_c}/step", json={"v_cmd": [0.06, 0.01]}).json()
    sid_d = client.post("/session", json={"face": "Left"}).json()["id"]
    for t in range(30):
        solo_b = client.post(f"/session/{sid_d}/step", json={"v_cmd": [0.03, -0.02]}).json()

    assert inter_a["state"] == solo_a["state"]
    assert inter_b["state"] == solo_b["state"]


def test_recorded_demo_drives_dp_plan(service, canonical_library, params):
    client, demo_dir = service
    demo = canonical_library.demos[1]
    sid = client.post("/session", json={"face": demo.faces[0].value}).json()["id"]
    drive_stream(client, sid, demo)
    client.post(f"/session/{sid}/finish", json={"label": "recorded"})

    library = DemoLibrary.load_dir(demo_dir)
    assert library.n_d == 1
    target = library.demos[0].reached
    assert select_demo(library, target) == 0
    report = plan(
        PlanRequest(
            target=target,
            method="dp",
            library=library,
            solver=SolverConfig(max_iterations=150),
        )
    )
    assert report.success
