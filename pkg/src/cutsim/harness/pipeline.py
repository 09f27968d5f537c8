"""The sequential meat-processing pipeline: slice, de-fat, cube.

Each stage plans from the current camera view (or directly from ground truth
when configured), executes the lifted trajectory through the tracking
simulator under workspace gating, and then partitions the exact ground-truth
polygons along the *executed* cut paths, so controller error propagates into
the product metrics.  Weight is a proxy: area x thickness x density, with
zero kerf.
"""

from __future__ import annotations

import datetime
import math
import uuid
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString, Polygon
from shapely.ops import split as shapely_split

from ..calib import CalibrationParams, MarkerPair, fit_calibration, pixel_to_robot
from ..config import RunConfig
from ..control import simulate_tracking
from ..planner import (
    CutPlan,
    PlanSpec,
    Task,
    contour_y_extent_at,
    lift_to_3d,
    plan_cubes,
    plan_point_to_point,
    plan_slices,
    plan_trim,
    trajectory_to_text,
)
from ..vision import NoInterfaceError, fat_meat_interface, segment_scene, write_ppm
from .scenegen import BoardGeometry, GroundTruth, render_pieces

__all__ = [
    "PieceRecord",
    "CutRecord",
    "TrimCutStats",
    "RunLog",
    "MetricStats",
    "ConsistencyReport",
    "TrimAccuracy",
    "run_pipeline",
    "consistency_report",
    "trim_accuracy",
    "save_runlog",
    "load_runlog_text",
    "execute_cut",
]

MIN_FAT_AREA_PX = 40  # below this the slice is considered fat-free


class PipelineStageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PieceRecord:
    """One piece of the inventory, geometry in cm/g.

    Slice-stage records are intermediate (their area reappears in cubes,
    discards, and leftovers): `final` is False for them and True for leaves.
    """

    stage: str  # slice | trim_discard | p2p_discard | cube | leftover
    slice_index: int
    kind: str  # meat | fat
    area_cm2: float
    length_cm: float
    width_cm: float
    thickness_cm: float
    weight_g: float
    polygon: Polygon | None = None
    final: bool = True


@dataclass
class CutRecord:
    """One executed cut: the plan, the realized path, and tracking stats."""

    stage: str
    slice_index: int
    planned: list[np.ndarray]
    executed_path: np.ndarray
    mean_error_m: float
    max_error_m: float
    held_steps: int


@dataclass
class TrimCutStats:
    """Fat/meat removed by one fat-removal cut, measured on ground truth."""

    slice_index: int
    mode: str  # trim | p2p
    fat_removed_cm2: float
    meat_removed_cm2: float
    meat_removed_g: float
    fat_thickness_cm: float
    meat_thickness_cm: float
    cut_length_cm: float


@dataclass
class RunLog:
    run_id: str
    created: str
    seed: int
    config_text: str
    board: BoardGeometry
    truth: GroundTruth
    n_slices: int
    cuts: list[CutRecord] = field(default_factory=list)
    pieces: list[PieceRecord] = field(default_factory=list)
    trim_stats: list[TrimCutStats] = field(default_factory=list)
    trajectories: list[tuple[str, object]] = field(default_factory=list)  # (name, Trajectory)
    scene: object | None = None


# --- geometry helpers --------------------------------------------------------

def _thin_path(xy: np.ndarray, min_step: float = 0.001) -> np.ndarray:
    """Drop executed samples closer than `min_step` to the last kept point."""
    kept = [xy[0]]
    for p in xy[1:]:
        if math.hypot(p[0] - kept[-1][0], p[1] - kept[-1][1]) >= min_step:
            kept.append(p)
    if not np.array_equal(kept[-1], xy[-1]):
        kept.append(xy[-1])
    return np.asarray(kept)


def _split_polygon(poly: Polygon, path: np.ndarray) -> list[Polygon]:
    line = LineString(path).simplify(1e-4)
    try:
        parts = shapely_split(poly, line)
    except Exception:
        # degenerate executed path: fall back to the chord through its endpoints
        parts = shapely_split(poly, LineString([path[0], path[-1]]))
    out = [g for g in parts.geoms if isinstance(g, Polygon) and g.area > 0]
    return out or [poly]


def _split_all(polys: list[Polygon], path: np.ndarray) -> list[Polygon]:
    out = []
    for p in polys:
        out.extend(_split_polygon(p, path))
    return out


def _side_of_chord(path: np.ndarray, poly: Polygon) -> int:
    a, b = path[0], path[-1]
    p = poly.representative_point()
    cross = (b[0] - a[0]) * (p.y - a[1]) - (b[1] - a[1]) * (p.x - a[0])
    return 1 if cross > 0 else -1


def _bbox_cm(poly: Polygon) -> tuple[float, float]:
    minx, miny, maxx, maxy = poly.bounds
    return (maxx - minx) * 100.0, (maxy - miny) * 100.0


def _piece(stage, idx, kind, poly, truth: GroundTruth, final: bool = True) -> PieceRecord:
    area_cm2 = poly.area * 1e4
    length, width = _bbox_cm(poly)
    weight = area_cm2 * truth.thickness_cm * truth.density_g_cm3 if kind == "meat" else 0.0
    return PieceRecord(
        stage, idx, kind, area_cm2, length, width, truth.thickness_cm, weight, poly, final
    )


# --- execution ---------------------------------------------------------------

def _staged(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc


def execute_cut(polyline: np.ndarray, task: Task, config: RunConfig, seed: int):
    """Lift one planar polyline, track it, and return the executed planar path."""
    plan = CutPlan([np.asarray(polyline, float)], task)
    traj = lift_to_3d(plan, config.profile(), config.region())
    report = simulate_tracking(traj, config.controller(), config.plant(), config.region(), seed)
    path = _thin_path(report.executed.xyz[:, :2])
    return path, report


def _segment_in_robot_frame(scene, config: RunConfig, params: CalibrationParams):
    seg = segment_scene(scene, config.color_ranges())
    meat_robot = pixel_to_robot(params, seg.meat_contour.astype(float))
    return seg, meat_robot


def proctor_markers(interface: np.ndarray, overhang: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Scripted stand-in for the human partner.

    Markers go just outside the meat on either side, aligned with the
    ground-truth interface endpoints, so the straight cut between them
    severs the piece completely.
    """
    a, b = np.asarray(interface[0], float), np.asarray(interface[-1], float)
    chord = b - a
    length = float(np.linalg.norm(chord))
    if length < 1e-9:
        raise ValueError("degenerate interface")
    d = chord / length * (overhang * length)
    return a - d, b + d


def _calibrate_board(board: BoardGeometry) -> CalibrationParams:
    """Fit the camera mapping from four operator-measured marker pairs."""
    true = board.true_calibration()
    w, h = board.image_size
    corners_px = [
        (board.margin_px + 5.0, board.margin_px + 5.0),
        (w - board.margin_px - 5.0, board.margin_px + 5.0),
        (w - board.margin_px - 5.0, h - board.margin_px - 5.0),
        (board.margin_px + 5.0, h - board.margin_px - 5.0),
    ]
    pairs = [MarkerPair(tuple(pixel_to_robot(true, c)), c) for c in corners_px]
    return fit_calibration(pairs)


def run_pipeline(scene, truth: GroundTruth, config: RunConfig, run_id: str | None = None) -> RunLog:
    """Slice the meat, remove fat per slice (trim or point-to-point), cube.

    Every cut is planned, lifted, tracked in simulation, and applied to the
    ground-truth polygons along the executed path.  Returns the complete run
    log; persistence is separate (`save_runlog`).
    """
    board = truth.board
    seed = config.getint("harness", "seed")
    mode = config.get("harness", "fat_removal")
    plan_source = config.get("harness", "plan_source")
    if mode not in ("trim", "p2p", "none"):
        raise ValueError(f"unknown fat_removal mode {mode!r}")
    if plan_source not in ("vision", "truth"):
        raise ValueError(f"unknown plan_source {plan_source!r}")

    params = _calibrate_board(board)
    log = RunLog(
        run_id=run_id or uuid.uuid4().hex[:12],
        created=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        seed=seed,
        config_text=config.to_ini(),
        board=board,
        truth=truth,
        n_slices=0,
        scene=scene,
    )
    rng = np.random.default_rng(seed)

    def contour_for_planning(polys_meat, polys_fat, stage_seed):
        if plan_source == "truth":
            merged = polys_meat[0]
            for p in polys_meat[1:]:
                merged = merged.union(p)
            return np.asarray(merged.exterior.coords[:-1])
        view = render_pieces(polys_meat, polys_fat, board, seed=stage_seed)
        _, meat_robot = _segment_in_robot_frame(view, config, params)
        return meat_robot

    # --- stage 1: slicing ---
    meat_contour = _staged("slice", contour_for_planning,
                           [truth.meat_polygon],
                           [truth.fat_polygon] if truth.fat_polygon else [],
                           seed)
    n = config.getint("planner", "n_slices")
    if n == 0:
        width_cm = (meat_contour[:, 0].max() - meat_contour[:, 0].min()) * 100.0
        n = max(2, int(round(width_cm / config.getfloat("planner", "slice_target_cm"))))
    log.n_slices = n
    slice_plan = _staged("slice", plan_slices, meat_contour, PlanSpec(Task.SLICE, n_pieces=n))

    # slice cuts must sever the fat layer riding on the meat's far edge
    if truth.fat_polygon is not None:
        fat_contour = np.asarray(truth.fat_polygon.exterior.coords[:-1])
        for polyline in slice_plan.polylines:
            x = polyline[0, 0]
            extent = contour_y_extent_at(fat_contour, x)
            if extent is not None:
                span = max(polyline[:, 1].max(), extent[1]) - min(polyline[:, 1].min(), extent[0])
                polyline[0, 1] = min(polyline[0, 1], extent[0] - 0.05 * span)
                polyline[1, 1] = max(polyline[1, 1], extent[1] + 0.05 * span)

    meat_pieces = [truth.meat_polygon]
    fat_pieces = [truth.fat_polygon] if truth.fat_polygon is not None else []
    for polyline in slice_plan.polylines:
        path, report = _staged("slice", execute_cut, polyline, Task.SLICE, config,
                               int(rng.integers(2**31)))
        log.cuts.append(
            CutRecord("slice", -1, [polyline], path,
                      report.mean_error, report.max_error, report.held_steps)
        )
        meat_pieces = _split_all(meat_pieces, path)
        fat_pieces = _split_all(fat_pieces, path)

    meat_pieces.sort(key=lambda p: p.centroid.x)
    for i, piece in enumerate(meat_pieces):
        log.pieces.append(_piece("slice", i, "meat", piece, truth, final=False))

    # --- stage 2: fat removal per slice; stage 3: cubing ---
    cube_spec = PlanSpec(Task.CUBE, cube_side_cm=config.getfloat("planner", "cube_side_cm"))
    trim_bound = config.getfloat("planner", "trim_bound_m")
    tol_px = config.getfloat("vision", "interface_tol_px")

    for i, slice_meat in enumerate(meat_pieces):
        x0, _, x1, _ = slice_meat.bounds
        slice_fat = [f for f in fat_pieces if x0 - 1e-9 <= f.centroid.x <= x1 + 1e-9]
        kept = slice_meat

        if mode != "none" and slice_fat:
            cut_path = None
            if mode == "trim":
                view = render_pieces([slice_meat], slice_fat, board,
                                     seed=seed + 1000 + i)
                seg = segment_scene(view, config.color_ranges())
                if seg.fat_area >= MIN_FAT_AREA_PX:
                    try:
                        interface_px = fat_meat_interface(seg, tol=tol_px)
                    except NoInterfaceError:
                        interface_px = None
                    if interface_px is not None and len(interface_px) >= 2:
                        pts = pixel_to_robot(params, interface_px.astype(float))
                        plan = _staged(f"trim[{i}]", plan_trim, pts, trim_bound)
                        cut_path, report = _staged(
                            f"trim[{i}]", execute_cut,
                            plan.polylines[0], Task.TRIM, config, int(rng.integers(2**31))
                        )
                        log.cuts.append(CutRecord("trim", i, plan.polylines, cut_path,
                                                  report.mean_error, report.max_error,
                                                  report.held_steps))
            else:  # p2p with the scripted proctor: markers beside the interface ends
                iface = truth.interface
                in_slice = iface[(iface[:, 0] >= x0) & (iface[:, 0] <= x1)]
                if len(in_slice) >= 2:
                    marker_a, marker_b = proctor_markers(in_slice)
                    plan = _staged(f"p2p[{i}]", plan_point_to_point, marker_a, marker_b)
                    cut_path, report = _staged(
                        f"p2p[{i}]", execute_cut,
                        plan.polylines[0], Task.POINT_TO_POINT, config, int(rng.integers(2**31))
                    )
                    log.cuts.append(CutRecord("p2p", i, plan.polylines, cut_path,
                                              report.mean_error, report.max_error,
                                              report.held_steps))

            if cut_path is not None:
                meat_parts = _split_polygon(slice_meat, cut_path)
                fat_parts = _split_all(slice_fat, cut_path)
                fat_by_side = {1: 0.0, -1: 0.0}
                for f in fat_parts:
                    fat_by_side[_side_of_chord(cut_path, f)] += f.area
                discard_side = max(fat_by_side, key=fat_by_side.get)
                kept_parts = [m for m in meat_parts if _side_of_chord(cut_path, m) != discard_side]
                discarded = [m for m in meat_parts if _side_of_chord(cut_path, m) == discard_side]
                if not kept_parts:  # the cut missed the meat: nothing removed
                    kept_parts, discarded = meat_parts, []
                kept = max(kept_parts, key=lambda p: p.area)
                stage = "trim_discard" if mode == "trim" else "p2p_discard"
                meat_removed = sum(p.area for p in discarded)
                fat_removed = sum(f.area for f in fat_parts
                                  if _side_of_chord(cut_path, f) == discard_side)
                cut_len = LineString(cut_path).intersection(
                    slice_meat.union(slice_fat[0]) if slice_fat else slice_meat
                ).length
                log.trim_stats.append(TrimCutStats(
                    slice_index=i,
                    mode=mode,
                    fat_removed_cm2=fat_removed * 1e4,
                    meat_removed_cm2=meat_removed * 1e4,
                    meat_removed_g=meat_removed * 1e4 * truth.thickness_cm * truth.density_g_cm3,
                    fat_thickness_cm=(fat_removed / cut_len * 100.0) if cut_len > 0 else 0.0,
                    meat_thickness_cm=(meat_removed / cut_len * 100.0) if cut_len > 0 else 0.0,
                    cut_length_cm=cut_len * 100.0,
                ))
                for p in discarded:
                    log.pieces.append(_piece(stage, i, "meat", p, truth))
                for f in fat_parts:
                    side = "fat"
                    log.pieces.append(_piece(
                        stage if _side_of_chord(cut_path, f) == discard_side else "leftover",
                        i, side, f, truth))
                for m in kept_parts:
                    if m is not kept:
                        log.pieces.append(_piece("leftover", i, "meat", m, truth))
            else:
                for f in slice_fat:
                    log.pieces.append(_piece("leftover", i, "fat", f, truth))
        else:
            for f in slice_fat:
                log.pieces.append(_piece("leftover", i, "fat", f, truth))

        # --- cubing the kept piece ---
        kx0, ky0, kx1, ky1 = kept.bounds
        side_m = cube_spec.cube_side_cm / 100.0
        if (kx1 - kx0) < side_m and (ky1 - ky0) < side_m:
            log.pieces.append(_piece("leftover", i, "meat", kept, truth))
            continue
        cube_contour = (contour_for_planning([kept], [], seed + 2000 + i)
                        if plan_source == "vision"
                        else np.asarray(kept.exterior.coords[:-1]))
        try:
            grid = plan_cubes(cube_contour, cube_spec)
        except ValueError:
            log.pieces.append(_piece("leftover", i, "meat", kept, truth))
            continue
        cube_parts = [kept]
        for polyline in grid.polylines:
            path, report = _staged(f"cube[{i}]", execute_cut, polyline, Task.CUBE, config,
                                   int(rng.integers(2**31)))
            log.cuts.append(CutRecord("cube", i, [polyline], path,
                                      report.mean_error, report.max_error, report.held_steps))
            cube_parts = _split_all(cube_parts, path)
        for p in cube_parts:
            log.pieces.append(_piece("cube", i, "meat", p, truth))

    return log


def compare_fat_removal(scene, truth: GroundTruth, config: RunConfig, seed: int = 0):
    """Trim vs point-to-point on one scene, without slicing first.

    The trim path follows the vision-extracted interface; the point-to-point
    cut is the straight line between the ground-truth interface endpoints
    (the scripted proctor).  Returns (trim: TrimCutStats, p2p: TrimCutStats)
    measured against the ground-truth polygons.
    """
    if truth.fat_polygon is None:
        raise ValueError("scene has no fat to remove")
    board = truth.board
    params = _calibrate_board(board)
    seg = segment_scene(scene, config.color_ranges())
    interface_px = fat_meat_interface(seg, tol=config.getfloat("vision", "interface_tol_px"))
    trim_pts = pixel_to_robot(params, interface_px.astype(float))
    trim_plan = plan_trim(trim_pts, config.getfloat("planner", "trim_bound_m"))
    marker_a, marker_b = proctor_markers(truth.interface)
    p2p_plan = plan_point_to_point(marker_a, marker_b)

    results = []
    for mode, plan in (("trim", trim_plan), ("p2p", p2p_plan)):
        path, _ = execute_cut(plan.polylines[0], plan.task, config, seed)
        meat_parts = _split_polygon(truth.meat_polygon, path)
        fat_parts = _split_polygon(truth.fat_polygon, path)
        fat_by_side = {1: 0.0, -1: 0.0}
        for f in fat_parts:
            fat_by_side[_side_of_chord(path, f)] += f.area
        discard = max(fat_by_side, key=fat_by_side.get)
        meat_removed = sum(m.area for m in meat_parts if _side_of_chord(path, m) == discard)
        fat_removed = fat_by_side[discard]
        cut_len = LineString(path).intersection(truth.meat_polygon.union(truth.fat_polygon)).length
        results.append(TrimCutStats(
            slice_index=-1,
            mode=mode,
            fat_removed_cm2=fat_removed * 1e4,
            meat_removed_cm2=meat_removed * 1e4,
            meat_removed_g=meat_removed * 1e4 * truth.thickness_cm * truth.density_g_cm3,
            fat_thickness_cm=(fat_removed / cut_len * 100.0) if cut_len > 0 else 0.0,
            meat_thickness_cm=(meat_removed / cut_len * 100.0) if cut_len > 0 else 0.0,
            cut_length_cm=cut_len * 100.0,
        ))
    return results[0], results[1]


# --- metrics -------------------------------------------------------------------

@dataclass
class MetricStats:
    n: int
    mean: float
    variance: float
    min: float
    max: float

    @classmethod
    def of(cls, values) -> "MetricStats":
        v = np.asarray(list(values), float)
        if v.size == 0:
            return cls(0, 0.0, 0.0, 0.0, 0.0)
        return cls(len(v), float(v.mean()), float(v.var()), float(v.min()), float(v.max()))


@dataclass
class ConsistencyReport:
    slice_thickness_cm: MetricStats
    slice_weight_g: MetricStats
    cube_length_cm: MetricStats
    cube_width_cm: MetricStats
    cube_weight_g: MetricStats
    cube_side_fraction: float  # both dimensions within [2.5, 3.5] cm
    slice_weight_band_fraction: float
    weight_band_g: tuple[float, float]


@dataclass
class TrimAccuracy:
    mode: str
    cuts: list[TrimCutStats]
    fat_thickness_cm: MetricStats
    meat_thickness_cm: MetricStats
    meat_removed_g: MetricStats


def consistency_report(log: RunLog, weight_band_g=(150.0, 250.0)) -> ConsistencyReport:
    """Size and weight consistency of slices and cubes."""
    slices = [p for p in log.pieces if p.stage == "slice"]
    cubes = [p for p in log.pieces if p.stage == "cube"]
    cube_ok = [
        p for p in cubes if 2.5 <= p.length_cm <= 3.5 and 2.5 <= p.width_cm <= 3.5
    ]
    in_band = [p for p in slices if weight_band_g[0] <= p.weight_g <= weight_band_g[1]]
    return ConsistencyReport(
        slice_thickness_cm=MetricStats.of(p.length_cm for p in slices),
        slice_weight_g=MetricStats.of(p.weight_g for p in slices),
        cube_length_cm=MetricStats.of(p.length_cm for p in cubes),
        cube_width_cm=MetricStats.of(p.width_cm for p in cubes),
        cube_weight_g=MetricStats.of(p.weight_g for p in cubes),
        cube_side_fraction=len(cube_ok) / len(cubes) if cubes else 0.0,
        slice_weight_band_fraction=len(in_band) / len(slices) if slices else 0.0,
        weight_band_g=weight_band_g,
    )


def trim_accuracy(log: RunLog) -> TrimAccuracy:
    """Per-cut fat/meat removal stats for the fat-removal stage."""
    if not log.trim_stats:
        raise ValueError("run has no fat-removal stage")
    mode = log.trim_stats[0].mode
    return TrimAccuracy(
        mode=mode,
        cuts=list(log.trim_stats),
        fat_thickness_cm=MetricStats.of(c.fat_thickness_cm for c in log.trim_stats),
        meat_thickness_cm=MetricStats.of(c.meat_thickness_cm for c in log.trim_stats),
        meat_removed_g=MetricStats.of(c.meat_removed_g for c in log.trim_stats),
    )


# --- persistence ---------------------------------------------------------------

def _poly_text(poly: Polygon) -> str:
    return " ".join(f"{x!r},{y!r}" for x, y in poly.exterior.coords[:-1])


def runlog_to_text(log: RunLog) -> str:
    lines = [
        "[run]",
        f"run_id={log.run_id}",
        f"created={log.created}",
        f"seed={log.seed}",
        f"n_slices={log.n_slices}",
        f"n_pieces={len(log.pieces)}",
        f"n_cuts={len(log.cuts)}",
        "",
        "[pieces]",
        "# stage slice_index kind area_cm2 length_cm width_cm thickness_cm weight_g",
    ]
    for p in log.pieces:
        lines.append(
            f"{p.stage} {p.slice_index} {p.kind} {p.area_cm2!r} "
            f"{p.length_cm!r} {p.width_cm!r} {p.thickness_cm!r} {p.weight_g!r}"
        )
    lines += ["", "[cuts]", "# stage slice_index mean_error_m max_error_m held_steps"]
    for c in log.cuts:
        lines.append(
            f"{c.stage} {c.slice_index} {c.mean_error_m!r} {c.max_error_m!r} {c.held_steps}"
        )
    lines += ["", "[trim_stats]",
              "# slice_index mode fat_removed_cm2 meat_removed_cm2 meat_removed_g cut_length_cm"]
    for t in log.trim_stats:
        lines.append(
            f"{t.slice_index} {t.mode} {t.fat_removed_cm2!r} {t.meat_removed_cm2!r} "
            f"{t.meat_removed_g!r} {t.cut_length_cm!r}"
        )
    lines += ["", "[config]"]
    lines += [f"  {line}" for line in log.config_text.splitlines()]
    return "\n".join(lines) + "\n"


def save_runlog(log: RunLog, out_dir) -> str:
    """Persist a run: structured-text log, scene snapshot, executed paths."""
    import os

    run_dir = os.path.join(str(out_dir), log.run_id)
    os.makedirs(run_dir, exist_ok=True)
    with open(os.path.join(run_dir, "runlog.txt"), "w") as f:
        f.write(runlog_to_text(log))
    if log.scene is not None:
        write_ppm(os.path.join(run_dir, "scene.ppm"), log.scene.pixels)
    with open(os.path.join(run_dir, "config.ini"), "w") as f:
        f.write(log.config_text)
    for i, cut in enumerate(log.cuts):
        path_file = os.path.join(run_dir, f"cut_{i:03d}_{cut.stage}.txt")
        with open(path_file, "w") as f:
            f.write("# executed planar path: x y\n")
            for x, y in cut.executed_path:
                f.write(f"{x!r} {y!r}\n")
    for name, traj in log.trajectories:
        with open(os.path.join(run_dir, name), "w") as f:
            f.write(trajectory_to_text(traj))
    return run_dir


def load_runlog_text(out_dir, run_id: str) -> str:
    import os

    path = os.path.join(str(out_dir), run_id, "runlog.txt")
    if not os.path.exists(path):
        raise FileNotFoundError(f"unknown run {run_id}")
    with open(path) as f:
        return f.read()
