"""HTTP service hosting the collaborative point-to-point mode.

A session owns the current board state (ground-truth piece polygons that
shrink as cuts remove discards).  The operator client reads the rendered
scene, posts two marker positions in scene-pixel coordinates, previews the
planned cut, and triggers execution; the service maps pixels to the robot
frame, simulates the cut under workspace gating, updates the board, persists
a run log, and reports fat/meat-removed stats.  All geometry lives server
side; clients draw exactly what the service returns.

Bodies are JSON.  Mutating requests are serialized through the session lock;
reads look at consistent snapshots.
"""

from __future__ import annotations

import base64
import json
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
from shapely.geometry import LineString

from ..calib import pixel_to_robot
from ..config import RunConfig
from ..planner import DegenerateCutError, Task, plan_point_to_point
from ..vision import segment_scene
from .pipeline import (
    CutRecord,
    RunLog,
    TrimCutStats,
    _calibrate_board,
    _piece,
    _side_of_chord,
    _split_all,
    execute_cut,
    load_runlog_text,
    save_runlog,
)
from .scenegen import GroundTruth, generate_scene, random_meat_spec, render_pieces

__all__ = ["Session", "make_server", "serve"]


class Session:
    """Single-board interactive state; mutations serialized by the lock."""

    def __init__(self, config: RunConfig, truth: GroundTruth, out_dir: str):
        self.lock = threading.Lock()
        self.config = config
        self.board = truth.board
        self.thickness_cm = truth.thickness_cm
        self.density = truth.density_g_cm3
        self.truth = truth
        self.meat_pieces = [truth.meat_polygon]
        self.fat_pieces = [truth.fat_polygon] if truth.fat_polygon is not None else []
        self.params = _calibrate_board(truth.board)
        self.markers_px: list | None = None
        self.out_dir = out_dir
        self.executions = 0

    # --- views ---------------------------------------------------------------

    def render(self):
        markers_robot = []
        if self.markers_px:
            markers_robot = [pixel_to_robot(self.params, m) for m in self.markers_px]
        return render_pieces(self.meat_pieces, self.fat_pieces, self.board, markers_robot)

    def scene_payload(self) -> dict:
        scene = self.render()
        try:
            seg = segment_scene(scene, self.config.color_ranges())
            seg_doc = {
                "meat": {"area": seg.meat_area, "contour": seg.meat_contour.tolist()},
                "fat": None
                if seg.fat_contour is None
                else {"area": seg.fat_area, "contour": seg.fat_contour.tolist()},
                "markers": [list(m) for m in seg.markers],
            }
        except ValueError:
            seg_doc = {"meat": None, "fat": None, "markers": []}
        region = self.config.region()
        def px(x, y):
            return self.board.robot_to_px((x, y)).tolist()
        return {
            "width": scene.width,
            "height": scene.height,
            "rgb_base64": base64.b64encode(scene.pixels.tobytes()).decode("ascii"),
            "segmentation": seg_doc,
            "board": {"px_per_m": self.board.px_per_m, "margin_px": self.board.margin_px},
            "safe_region_px": px(region.x_min, region.y_min) + px(region.x_max, region.y_max),
            "executions": self.executions,
        }

    # --- marker / plan / execute ----------------------------------------------

    def set_markers(self, markers) -> None:
        if not isinstance(markers, list) or len(markers) != 2:
            raise ValueError(f"exactly 2 markers required, got {markers!r}")
        pts = []
        for m in markers:
            if not (isinstance(m, (list, tuple)) and len(m) == 2):
                raise ValueError(f"marker must be [x, y], got {m!r}")
            pts.append([float(m[0]), float(m[1])])
        if abs(pts[0][0] - pts[1][0]) < 1e-9 and abs(pts[0][1] - pts[1][1]) < 1e-9:
            raise ValueError("markers are coincident")
        self.markers_px = pts

    def plan_payload(self) -> dict:
        if self.markers_px is None:
            raise LookupError("no markers placed")
        a = pixel_to_robot(self.params, self.markers_px[0])
        b = pixel_to_robot(self.params, self.markers_px[1])
        plan = plan_point_to_point(a, b)  # raises DegenerateCutError when coincident
        line = plan.polylines[0]
        return {
            "robot": line.tolist(),
            "pixels": [self.board.robot_to_px(p).tolist() for p in line],
        }

    def execute(self) -> dict:
        plan = self.plan_payload()
        polyline = np.asarray(plan["robot"])
        seed = self.executions
        path, report = execute_cut(polyline, Task.POINT_TO_POINT, self.config, seed)

        new_meat = _split_all(self.meat_pieces, path)
        new_fat = _split_all(self.fat_pieces, path)
        fat_by_side = {1: 0.0, -1: 0.0}
        for f in new_fat:
            fat_by_side[_side_of_chord(path, f)] += f.area
        discard_side = max(fat_by_side, key=fat_by_side.get)
        if fat_by_side[discard_side] == 0.0:
            # no fat in play: discard the smaller meat side
            meat_by_side = {1: 0.0, -1: 0.0}
            for m in new_meat:
                meat_by_side[_side_of_chord(path, m)] += m.area
            discard_side = min(meat_by_side, key=meat_by_side.get)

        kept_meat = [m for m in new_meat if _side_of_chord(path, m) != discard_side]
        cut_meat = [m for m in new_meat if _side_of_chord(path, m) == discard_side]
        kept_fat = [f for f in new_fat if _side_of_chord(path, f) != discard_side]
        cut_fat = [f for f in new_fat if _side_of_chord(path, f) == discard_side]

        meat_removed = sum(m.area for m in cut_meat)
        fat_removed = sum(f.area for f in cut_fat)
        stats = TrimCutStats(
            slice_index=self.executions,
            mode="p2p",
            fat_removed_cm2=fat_removed * 1e4,
            meat_removed_cm2=meat_removed * 1e4,
            meat_removed_g=meat_removed * 1e4 * self.thickness_cm * self.density,
            fat_thickness_cm=0.0,
            meat_thickness_cm=0.0,
            cut_length_cm=LineString(path).length * 100.0,
        )

        run_id = uuid.uuid4().hex[:12]
        log = RunLog(
            run_id=run_id,
            created="",
            seed=seed,
            config_text=self.config.to_ini(),
            board=self.board,
            truth=self.truth,
            n_slices=0,
        )
        log.cuts.append(
            CutRecord("p2p", self.executions, [polyline], path,
                      report.mean_error, report.max_error, report.held_steps)
        )
        log.trim_stats.append(stats)
        for m in cut_meat:
            log.pieces.append(_piece("p2p_discard", self.executions, "meat", m, self.truth))
        for f in cut_fat:
            log.pieces.append(_piece("p2p_discard", self.executions, "fat", f, self.truth))
        save_runlog(log, self.out_dir)

        self.meat_pieces = kept_meat or new_meat
        self.fat_pieces = kept_fat
        self.executions += 1
        self.markers_px = None

        return {
            "run_id": run_id,
            "trajectory": {
                "robot": path.tolist(),
                "pixels": [self.board.robot_to_px(p).tolist() for p in path],
            },
            "stats": {
                "fat_removed_cm2": stats.fat_removed_cm2,
                "meat_removed_cm2": stats.meat_removed_cm2,
                "meat_removed_g": stats.meat_removed_g,
                "held_steps": report.held_steps,
                "mean_error_m": report.mean_error,
            },
            "scene": self.scene_payload(),
        }


class _Handler(BaseHTTPRequestHandler):
    session: Session = None
    static_dir: str | None = None

    def log_message(self, *args):  # quiet by default
        pass

    def _send(self, code: int, payload, content_type="application/json"):
        body = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, reason: str):
        self._send(code, {"error": reason})

    def _read_json(self):
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        return json.loads(raw)

    def do_GET(self):
        s = self.session
        if self.path == "/scene":
            with s.lock:
                self._send(200, s.scene_payload())
        elif self.path == "/plan":
            with s.lock:
                try:
                    self._send(200, s.plan_payload())
                except LookupError:
                    self._error(409, "no markers placed; POST /markers first")
                except DegenerateCutError as e:
                    self._error(422, str(e))
        elif m := re.fullmatch(r"/runs/([0-9a-f]+)", self.path):
            try:
                text = load_runlog_text(s.out_dir, m.group(1))
                self._send(200, text.encode(), content_type="text/plain")
            except FileNotFoundError:
                self._error(404, f"unknown run {m.group(1)}")
        elif self.static_dir:
            self._serve_static()
        else:
            self._error(404, f"no route {self.path}")

    def do_POST(self):
        s = self.session
        if self.path == "/markers":
            try:
                doc = self._read_json()
            except json.JSONDecodeError as e:
                return self._error(400, f"bad JSON: {e}")
            with s.lock:
                try:
                    s.set_markers(doc.get("markers"))
                except ValueError as e:
                    return self._error(422, str(e))
                self._send(200, {"ok": True})
        elif self.path == "/execute":
            with s.lock:
                if s.markers_px is None:
                    return self._error(409, "nothing planned; POST /markers first")
                try:
                    self._send(200, s.execute())
                except DegenerateCutError as e:
                    self._error(422, str(e))
        else:
            self._error(404, f"no route {self.path}")

    def _serve_static(self):
        import os

        rel = self.path.lstrip("/") or "index.html"
        path = os.path.normpath(os.path.join(self.static_dir, rel))
        if not path.startswith(os.path.abspath(self.static_dir)):
            return self._error(404, "not found")
        if not os.path.isfile(path):
            return self._error(404, f"no route {self.path}")
        ctype = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
        }.get(os.path.splitext(path)[1], "application/octet-stream")
        with open(path, "rb") as f:
            self._send(200, f.read(), content_type=ctype)


def make_server(
    config: RunConfig,
    port: int = 0,
    truth: GroundTruth | None = None,
    static_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the service; port 0 picks a free port."""
    if truth is None:
        seed = config.getint("harness", "seed")
        _, truth = generate_scene(random_meat_spec(seed))
    import os

    out_dir = config.get("harness", "out_dir")
    session = Session(config, truth, out_dir)
    handler = type("Handler", (_Handler,), {
        "session": session,
        "static_dir": os.path.abspath(static_dir) if static_dir else None,
    })
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(config: RunConfig, port: int = 8732, static_dir: str | None = None):
    """Run the service until interrupted."""
    server = make_server(config, port, static_dir=static_dir)
    host, actual_port = server.server_address
    print(f"cutsim service on http://{host}:{actual_port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    finally:
        server.server_close()
