import base64
import json
import threading
import urllib.error
import urllib.request

import numpy as np
import pytest

from cutsim.config import RunConfig
from cutsim.harness import generate_scene, random_meat_spec
from cutsim.harness.service import make_server
from cutsim.workspace import SafeRegion


@pytest.fixture()
def server(tmp_path):
    ini = (
        "[harness]\nout_dir = {out}\n"
        "[planner]\npause_spacing = 0.05\nperiod_T = 0.4\ntravel_speed = 0.2\n"
        "[control]\ncommand_noise_sigma = 0.0\n"
    ).format(out=tmp_path.as_posix())
    config = RunConfig.from_ini(ini)
    _, truth = generate_scene(random_meat_spec(11))
    srv = make_server(config, port=0, truth=truth)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def get(base, path):
    with urllib.request.urlopen(base + path) as r:
        body = r.read()
        if r.headers.get("Content-Type", "").startswith("application/json"):
            return r.status, json.loads(body)
        return r.status, body


def post(base, path, doc):
    req = urllib.request.Request(
        base + path, data=json.dumps(doc).encode(), method="POST",
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(req) as r:
        return r.status, json.loads(r.read())


def error_status(fn):
    try:
        fn()
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())
    raise AssertionError("expected an HTTP error")


def test_scene_payload(server):
    status, doc = get(server, "/scene")
    assert status == 200
    raw = base64.b64decode(doc["rgb_base64"])
    assert len(raw) == doc["width"] * doc["height"] * 3
    assert doc["segmentation"]["meat"]["area"] > 0
    assert doc["segmentation"]["fat"]["area"] > 0
    assert len(doc["safe_region_px"]) == 4


def test_plan_before_markers_conflict(server):
    code, doc = error_status(lambda: get(server, "/plan"))
    assert code == 409
    assert "markers" in doc["error"]


def test_execute_before_markers_conflict(server):
    code, _ = error_status(lambda: post(server, "/execute", {}))
    assert code == 409


def test_marker_count_validated(server):
    code, doc = error_status(lambda: post(server, "/markers", {"markers": [[10, 10]]}))
    assert code == 422
    code, _ = error_status(
        lambda: post(server, "/markers", {"markers": [[1, 1], [2, 2], [3, 3]]})
    )
    assert code == 422


def test_coincident_markers_rejected(server):
    code, doc = error_status(
        lambda: post(server, "/markers", {"markers": [[50.0, 60.0], [50.0, 60.0]]})
    )
    assert code == 422
    assert "coincident" in doc["error"]


def test_plan_idempotent_and_straight(server):
    markers = [[60.0, 200.0], [380.0, 205.0]]
    post(server, "/markers", {"markers": markers})
    _, p1 = get(server, "/plan")
    _, p2 = get(server, "/plan")
    assert p1 == p2
    assert len(p1["pixels"]) == 2 and len(p1["robot"]) == 2


def test_execute_cut_updates_scene_and_stays_safe(server):
    _, before = get(server, "/scene")
    markers = [[60.0, 190.0], [380.0, 195.0]]
    post(server, "/markers", {"markers": markers})
    status, doc = post(server, "/execute", {})
    assert status == 200
    traj = np.array(doc["trajectory"]["robot"])
    region = SafeRegion(-0.02, 0.42, -0.02, 0.32, 0.0, 0.30)
    assert traj[:, 0].min() >= region.x_min and traj[:, 0].max() <= region.x_max
    assert traj[:, 1].min() >= region.y_min and traj[:, 1].max() <= region.y_max
    assert doc["stats"]["meat_removed_g"] >= 0
    assert doc["scene"]["executions"] == before["executions"] + 1
    # the run is persisted and retrievable
    status, text = get(server, f"/runs/{doc['run_id']}")
    assert status == 200
    assert f"run_id={doc['run_id']}".encode() in text

    # a second execution without new markers conflicts
    code, _ = error_status(lambda: post(server, "/execute", {}))
    assert code == 409


def test_unknown_run_404(server):
    code, doc = error_status(lambda: get(server, "/runs/deadbeef0000"))
    assert code == 404


def test_unknown_route_404(server):
    code, _ = error_status(lambda: get(server, "/nope"))
    assert code == 404
