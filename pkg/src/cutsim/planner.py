"""Cut planning: from segmented contours to timed 3-D knife trajectories.

Planar plans are built in robot coordinates (meters); the harness converts
pixel contours through the calibration before planning.  Four tasks are
supported: slicing (equally spaced vertical cuts), point-to-point (a straight
cut between two human-placed markers), trimming (a simplified polyline along
the fat-meat interface), and cubing (an orthogonal grid).  `lift_to_3d` turns
a planar plan into a timed waypoint sequence: travel at a safe height,
pausing at equal intervals for one raised-cosine plunge period per pause, the
knife heading always pointing at the next planar waypoint.

Trim paths are simplified with SQUISH-E: greedy priority-queue removal where
each point's priority upper-bounds the deviation its removal introduces, so
every removed point stays within the requested bound of the segment joining
its surviving neighbors (deviation is measured against index-synchronized
linear interpolation, the spatial analog of synchronized Euclidean distance
for untimed points).
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .workspace import SafeRegion, clamp_plan

__all__ = [
    "Task",
    "PlanSpec",
    "CutPlan",
    "CutMotionProfile",
    "Trajectory",
    "InfeasiblePlanError",
    "DegenerateCutError",
    "InsufficientPointsError",
    "plan_slices",
    "plan_point_to_point",
    "plan_trim",
    "plan_cubes",
    "squish_e",
    "lift_to_3d",
    "trajectory_to_text",
    "trajectory_from_text",
]

END_EXTENSION_FRACTION = 0.05  # cuts overshoot the contour so pieces separate fully
MIN_SLICE_WIDTH = 0.01  # meters


class InfeasiblePlanError(ValueError):
    """The requested plan cannot be cut from this piece."""


class DegenerateCutError(ValueError):
    """Coincident markers define no cut direction."""


class InsufficientPointsError(ValueError):
    """Too few interface points to fit a trim path."""


class Task(enum.Enum):
    SLICE = "slice"
    POINT_TO_POINT = "point_to_point"
    TRIM = "trim"
    CUBE = "cube"


@dataclass(frozen=True)
class PlanSpec:
    """What to cut: the task plus its parameters.

    `n_pieces` is the piece count for slicing/cubing, `squish_bound` the trim
    simplification bound in the units of the input points, `cube_side_cm` the
    cube edge in centimeters.
    """

    task: Task
    n_pieces: int = 0
    squish_bound: float = 0.0
    cube_side_cm: float = 3.0

    def __post_init__(self):
        if self.task is Task.SLICE and self.n_pieces < 2:
            raise ValueError(f"n_pieces must be >= 2 for slicing, got {self.n_pieces}")
        if self.squish_bound < 0:
            raise ValueError("squish_bound must be >= 0")
        if self.cube_side_cm <= 0:
            raise ValueError("cube_side_cm must be positive")


@dataclass
class CutPlan:
    """Planar cut polylines in robot coordinates (meters)."""

    polylines: list[np.ndarray]
    task: Task

    def __post_init__(self):
        self.polylines = [np.asarray(p, dtype=float) for p in self.polylines]
        for p in self.polylines:
            if p.ndim != 2 or p.shape[1] != 2 or len(p) < 2:
                raise ValueError(f"polylines need >= 2 planar points, got shape {p.shape}")


@dataclass(frozen=True)
class CutMotionProfile:
    """Vertical motion profile for cutting.

    The knife travels at `z_travel`, pausing every `pause_spacing` meters of
    path for one full raised-cosine plunge of period `period_T` down to
    `z_cut_depth`.  `travel_speed` and `waypoint_dt` discretize the plan into
    timed waypoints.
    """

    z_travel: float = 0.10
    z_cut_depth: float = 0.005
    period_T: float = 2.0
    pause_spacing: float = 0.02
    travel_speed: float = 0.05
    waypoint_dt: float = 0.01

    def __post_init__(self):
        if not self.z_travel > self.z_cut_depth:
            raise ValueError("z_travel must exceed z_cut_depth")
        if self.period_T <= 0 or self.pause_spacing <= 0:
            raise ValueError("period_T and pause_spacing must be positive")
        if self.travel_speed <= 0 or self.waypoint_dt <= 0:
            raise ValueError("travel_speed and waypoint_dt must be positive")


@dataclass
class Trajectory:
    """Timed waypoints: times (n,), positions (n, 3), knife heading (n,)."""

    t: np.ndarray
    xyz: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, float)
        self.xyz = np.asarray(self.xyz, float)
        self.phi = np.asarray(self.phi, float)
        if not (len(self.t) == len(self.xyz) == len(self.phi)):
            raise ValueError("t, xyz, phi lengths differ")

    def __len__(self):
        return len(self.t)


# --- polygon helpers ---------------------------------------------------------

def _contour_edges(contour: np.ndarray):
    closed = np.vstack([contour, contour[:1]])
    return closed[:-1], closed[1:]


def _crossings_at_x(contour: np.ndarray, x: float) -> np.ndarray:
    """y values where the closed contour meets the vertical line at x."""
    a, b = _contour_edges(contour)
    ys = []
    for (x0, y0), (x1, y1) in zip(a, b):
        if x0 == x1:
            if x0 == x:
                ys.extend([y0, y1])
            continue
        if (x0 - x) * (x1 - x) <= 0:
            ys.append(y0 + (x - x0) / (x1 - x0) * (y1 - y0))
    return np.asarray(ys)


def contour_y_extent_at(contour: np.ndarray, x: float):
    """(y_min, y_max) where the closed contour spans the vertical line at x, or None."""
    ys = _crossings_at_x(np.asarray(contour, float), x)
    if ys.size == 0:
        return None
    return float(ys.min()), float(ys.max())


# --- planners ----------------------------------------------------------------

def plan_slices(meat_contour: np.ndarray, spec: PlanSpec) -> CutPlan:
    """N-1 equally spaced vertical cuts producing N slices.

    Cut k runs at x = x_left + k * (x_right - x_left) / N and spans the
    meat's y extent at that x plus a 5% margin on each end.
    """
    contour = np.asarray(meat_contour, float)
    n = spec.n_pieces
    x_left, x_right = contour[:, 0].min(), contour[:, 0].max()
    if (x_right - x_left) < n * MIN_SLICE_WIDTH:
        raise InfeasiblePlanError(
            f"meat spans {x_right - x_left:.4f} m, too narrow for {n} slices"
        )
    polylines = []
    for k in range(1, n):
        x = x_left + k * (x_right - x_left) / n
        ys = _crossings_at_x(contour, x)
        if ys.size == 0:
            raise InfeasiblePlanError(f"cut line at x={x:.4f} misses the meat")
        y0, y1 = ys.min(), ys.max()
        margin = END_EXTENSION_FRACTION * (y1 - y0)
        polylines.append(np.array([[x, y0 - margin], [x, y1 + margin]]))
    return CutPlan(polylines, Task.SLICE)


def plan_point_to_point(marker_a, marker_b) -> CutPlan:
    """A straight cut between two human-placed markers (robot frame)."""
    a = np.asarray(marker_a, float)
    b = np.asarray(marker_b, float)
    if np.linalg.norm(b - a) < 1e-9:
        raise DegenerateCutError(f"markers coincide at {tuple(a)}")
    return CutPlan([np.array([a, b])], Task.POINT_TO_POINT)


def plan_trim(interface_points: np.ndarray, squish_bound: float) -> CutPlan:
    """Simplified cut along the fat-meat interface, extended past both ends.

    The interface points are compressed with SQUISH-E at `squish_bound`, then
    both ends are extended along their tangents by 5% of the path length so
    the cut exits the meat.
    """
    pts = np.asarray(interface_points, float)
    if len(pts) < 2:
        raise InsufficientPointsError(f"need >= 2 interface points, got {len(pts)}")
    path = squish_e(pts, squish_bound)
    length = float(np.linalg.norm(np.diff(path, axis=0), axis=1).sum())
    ext = END_EXTENSION_FRACTION * length
    t_start = path[0] - path[1]
    t_end = path[-1] - path[-2]
    t_start = t_start / np.linalg.norm(t_start)
    t_end = t_end / np.linalg.norm(t_end)
    extended = np.vstack([path[0] + ext * t_start, path, path[-1] + ext * t_end])
    return CutPlan([extended], Task.TRIM)


def plan_cubes(meat_contour: np.ndarray, spec: PlanSpec) -> CutPlan:
    """Orthogonal grid of cuts spaced one cube side apart.

    One family parallel to the slicing direction (vertical lines), one
    orthogonal, both anchored at the piece's minimal corner and spanning the
    orthogonal extent plus a 5% margin.
    """
    contour = np.asarray(meat_contour, float)
    side = spec.cube_side_cm / 100.0
    x0, x1 = contour[:, 0].min(), contour[:, 0].max()
    y0, y1 = contour[:, 1].min(), contour[:, 1].max()
    if (x1 - x0) < side and (y1 - y0) < side:
        raise InfeasiblePlanError(
            f"piece {x1 - x0:.3f} x {y1 - y0:.3f} m is smaller than one {side:.3f} m cube"
        )
    polylines = []
    my = END_EXTENSION_FRACTION * (y1 - y0)
    k = 1
    while x0 + k * side < x1 - 1e-9 * max(1.0, x1 - x0):
        x = x0 + k * side
        polylines.append(np.array([[x, y0 - my], [x, y1 + my]]))
        k += 1
    mx = END_EXTENSION_FRACTION * (x1 - x0)
    k = 1
    while y0 + k * side < y1 - 1e-9 * max(1.0, y1 - y0):
        y = y0 + k * side
        polylines.append(np.array([[x0 - mx, y], [x1 + mx, y]]))
        k += 1
    return CutPlan(polylines, Task.CUBE)


# --- SQUISH-E ----------------------------------------------------------------

def _index_sync_deviation(points: np.ndarray, i: int, k: int, j: int) -> float:
    """Distance from point k to the index-synchronized interpolation of i..j."""
    span = j - i
    ref = ((j - k) * points[i] + (k - i) * points[j]) / span
    return float(np.linalg.norm(points[k] - ref))


def squish_e(polyline: np.ndarray, bound: float) -> np.ndarray:
    """Compress a polyline to a subsequence within a per-point deviation bound.

    Points are removed greedily in priority order, the priority being the
    point's current deviation estimate plus the largest priority of any
    already-removed neighbor, so it upper-bounds the deviation of the removed
    point from the segment of its final surviving neighbors.  Removal stops
    when the smallest priority exceeds the bound.  Endpoints always survive,
    the output is a subsequence of the input, and a larger bound never yields
    more points.
    """
    pts = np.asarray(polyline, float)
    n = len(pts)
    if n < 2:
        raise ValueError("polyline needs >= 2 points")
    if n == 2:
        return pts.copy()

    prev = np.arange(-1, n - 1)
    nxt = np.arange(1, n + 1)
    inherited = np.zeros(n)
    alive = np.ones(n, bool)

    def priority(k: int) -> float:
        return inherited[k] + _index_sync_deviation(pts, prev[k], k, nxt[k])

    heap = [(priority(k), k) for k in range(1, n - 1)]
    heapq.heapify(heap)
    current = {k: p for p, k in heap}

    while heap:
        p, k = heapq.heappop(heap)
        if not alive[k] or p != current[k]:
            continue  # stale entry
        if p > bound:
            break
        alive[k] = False
        i, j = prev[k], nxt[k]
        nxt[i], prev[j] = j, i
        for r in (i, j):
            if 0 < r < n - 1 and alive[r]:
                inherited[r] = max(inherited[r], p)
                pr = priority(r)
                current[r] = pr
                heapq.heappush(heap, (pr, r))
    return pts[alive]


# --- lifting to timed 3-D ----------------------------------------------------

def _plunge_z(profile: CutMotionProfile, frac: float) -> float:
    """Raised-cosine height at phase `frac` of one plunge period.

    Written as a convex blend so the top and bottom samples are exact.
    """
    w = (1.0 - math.cos(2.0 * math.pi * frac)) / 2.0
    return profile.z_travel * (1.0 - w) + profile.z_cut_depth * w


def _sample_polyline(polyline: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """Points at the given arc-length distances along a polyline."""
    seg = np.diff(polyline, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    out = np.empty((len(distances), 2))
    for idx, s in enumerate(distances):
        s = min(max(s, 0.0), cum[-1])
        k = int(np.searchsorted(cum, s, side="right") - 1)
        k = min(k, len(seg) - 1)
        frac = 0.0 if seg_len[k] == 0 else (s - cum[k]) / seg_len[k]
        out[idx] = polyline[k] + frac * seg[k]
    return out


def lift_to_3d(plan: CutPlan, profile: CutMotionProfile, region: SafeRegion) -> Trajectory:
    """Lift a planar plan into a timed, clamped 3-D waypoint sequence.

    Each polyline is traversed at `z_travel`, pausing at equal intervals no
    wider than `pause_spacing` (endpoints included) for one raised-cosine
    plunge period.  Headings point at the next planar waypoint; the final
    waypoint repeats the previous heading.  The whole sequence is clamped
    into the safe region; if clamping collapses a polyline to a single planar
    point the plan is infeasible.
    """
    if not plan.polylines:
        raise ValueError("empty plan")
    m = int(round(profile.period_T / profile.waypoint_dt))
    m = max(2, m + (m % 2))  # even, so the plunge midpoint sample hits bottom exactly
    plunge_dt = profile.period_T / m
    ds = profile.travel_speed * profile.waypoint_dt

    times: list[float] = []
    planar: list[np.ndarray] = []
    zs: list[float] = []
    sections: list[tuple[int, int]] = []
    t = 0.0

    def emit(p, z, dt):
        nonlocal t
        if times:
            t += dt
        times.append(t)
        planar.append(np.asarray(p, float))
        zs.append(z)

    for polyline in plan.polylines:
        start_index = len(times)
        seg_len = np.linalg.norm(np.diff(polyline, axis=0), axis=1)
        length = float(seg_len.sum())
        n_int = max(1, math.ceil(length / profile.pause_spacing - 1e-12))
        stations = np.linspace(0.0, length, n_int + 1)
        station_pts = _sample_polyline(polyline, stations)

        if planar:
            # link from the previous polyline end at travel height
            link = np.array([planar[-1], station_pts[0]])
            link_len = float(np.linalg.norm(link[1] - link[0]))
            steps = int(link_len // ds)
            for i in range(1, steps + 1):
                emit(link[0] + (i * ds / link_len) * (link[1] - link[0]), profile.z_travel, profile.waypoint_dt)
            rem = link_len - steps * ds
            if rem > 1e-12:
                emit(station_pts[0], profile.z_travel, rem / profile.travel_speed)
        else:
            emit(station_pts[0], profile.z_travel, 0.0)

        for k, station in enumerate(station_pts):
            if k > 0:
                # travel along the path from the previous station
                s_prev, s_here = stations[k - 1], stations[k]
                s = s_prev + ds
                while s < s_here - 1e-12:
                    emit(_sample_polyline(polyline, np.array([s]))[0], profile.z_travel, profile.waypoint_dt)
                    s += ds
                last_gap = s_here - (s - ds)
                if last_gap > 1e-9:
                    emit(station, profile.z_travel, last_gap / profile.travel_speed)
            for i in range(1, m + 1):
                emit(station, _plunge_z(profile, i / m), plunge_dt)
        sections.append((start_index, len(times)))

    xyz = np.column_stack([np.array(planar), np.array(zs)])
    clamped = clamp_plan(region, xyz)

    for (i0, i1), polyline in zip(sections, plan.polylines):
        spread_before = np.ptp(polyline[:, 0]) + np.ptp(polyline[:, 1])
        planar_sec = clamped[i0:i1, :2]
        spread_after = np.ptp(planar_sec[:, 0]) + np.ptp(planar_sec[:, 1])
        if spread_before > 1e-12 and spread_after < 1e-12:
            raise InfeasiblePlanError("polyline collapses to a point after workspace clamping")

    # heading: atan2 toward the next distinct planar waypoint, computed in one
    # reverse pass; trailing waypoints with no distinct successor repeat the
    # previous heading
    n = len(clamped)
    xp, yp = clamped[:, 0].tolist(), clamped[:, 1].tolist()
    phi_list: list[float | None] = [None] * n
    nd = None
    for i in range(n - 2, -1, -1):
        if abs(xp[i + 1] - xp[i]) > 1e-12 or abs(yp[i + 1] - yp[i]) > 1e-12:
            nd = i + 1
        if nd is not None:
            phi_list[i] = math.atan2(yp[nd] - yp[i], xp[nd] - xp[i])
    prev_phi = 0.0
    for i in range(n):
        if phi_list[i] is None:
            phi_list[i] = prev_phi
        else:
            prev_phi = phi_list[i]
    return Trajectory(np.array(times), clamped, np.array(phi_list, float))


# --- text interface ----------------------------------------------------------

def trajectory_to_text(traj: Trajectory) -> str:
    lines = ["# t x y z phi"]
    for t, (x, y, z), phi in zip(traj.t, traj.xyz, traj.phi):
        lines.append(" ".join(repr(float(v)) for v in (t, x, y, z, phi)))
    return "\n".join(lines) + "\n"


def trajectory_from_text(text: str) -> Trajectory:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ValueError(f"line {lineno}: expected 't x y z phi', got {len(fields)} fields")
        rows.append(tuple(map(float, fields)))
    if not rows:
        raise ValueError("no waypoints in text")
    arr = np.array(rows)
    return Trajectory(arr[:, 0], arr[:, 1:4], arr[:, 4])
