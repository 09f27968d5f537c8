"""The collaborative point-to-point mode, driven over HTTP.

Starts the service in-process, plays the operator: read the scene, place two
markers beside the fat, preview the plan, execute, and inspect the stats the
operator console would display.
"""

import json
import threading
import urllib.request

from cutsim.config import RunConfig
from cutsim.harness import generate_scene, random_meat_spec
from cutsim.harness.service import make_server

config = RunConfig.from_ini("[harness]\nout_dir = runs\n")
_, truth = generate_scene(random_meat_spec(seed=11))
server = make_server(config, port=0, truth=truth)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print(f"service at {base}")


def get(path):
    with urllib.request.urlopen(base + path) as r:
        return json.loads(r.read()) if "json" in r.headers["Content-Type"] else r.read()


def post(path, doc):
    req = urllib.request.Request(base + path, data=json.dumps(doc).encode(), method="POST")
    with urllib.request.urlopen(req) as r:
        return json.loads(r.read())


scene = get("/scene")
print(f"scene {scene['width']}x{scene['height']}, meat {scene['segmentation']['meat']['area']} px, "
      f"fat {scene['segmentation']['fat']['area']} px")

markers = [[60.0, 190.0], [380.0, 195.0]]  # scene pixels, straddling the fat band
post("/markers", {"markers": markers})
plan = get("/plan")
print(f"plan preview: {plan['robot']} (robot meters)")

result = post("/execute", {})
stats = result["stats"]
print(f"executed run {result['run_id']}: fat removed {stats['fat_removed_cm2']:.1f} cm2, "
      f"meat removed {stats['meat_removed_g']:.1f} g, "
      f"tracking error {stats['mean_error_m'] * 1000:.2f} mm")
print(f"post-cut scene shows {result['scene']['segmentation']['meat']['area']} px of meat")

runlog = get(f"/runs/{result['run_id']}")
print(f"persisted run log: {len(runlog)} bytes")
server.shutdown()
