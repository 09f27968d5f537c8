"""Camera-to-robot calibration on the table plane.

The camera sees markers in pixel coordinates, the robot measures the same
markers in meters.  The two frames are related by

    p_robot = T @ p_camera - offset

where T is a scaled rotation built from five parameters: an angle theta0,
per-axis scales theta1/theta2 (meters per pixel), and the offset components
theta3/theta4.  Columns of T are orthogonal by construction.  Fitting
minimizes the summed squared residual over marker pairs with a damped
Gauss-Newton iteration, multi-started over four initial angles to avoid the
angular local minimum of the bilinear objective.

The reported residual (and `calibration_residual`) is the plain sum of
Euclidean residual norms in meters; the solver internally minimizes its
squared counterpart, which is smooth and has the same minimizer at an exact
fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MarkerPair",
    "CalibrationParams",
    "InsufficientDataError",
    "RankDeficiencyError",
    "ConvergenceError",
    "fit_calibration",
    "pixel_to_robot",
    "calibration_residual",
    "read_pairs_text",
    "write_pairs_text",
    "params_to_text",
    "params_from_text",
]

MIN_PAIRS = 4
MAX_ITERATIONS = 200
STEP_TOLERANCE = 1e-10
ANGLE_STARTS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


class InsufficientDataError(ValueError):
    """Fewer marker pairs than the fit requires."""


class RankDeficiencyError(ValueError):
    """Camera points are collinear or coincident; the transform is not identifiable."""


class ConvergenceError(RuntimeError):
    """No solver start converged within the iteration budget.

    Carries the best iterate found so far in `best`.
    """

    def __init__(self, message: str, best: "CalibrationParams"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class MarkerPair:
    """One marker seen by both frames: robot position in meters, camera in pixels."""

    robot_xy: tuple[float, float]
    camera_xy: tuple[float, float]

    def __post_init__(self):
        rx, ry = self.robot_xy
        cx, cy = self.camera_xy
        if not all(map(math.isfinite, (rx, ry, cx, cy))):
            raise ValueError("marker coordinates must be finite")
        if cx < 0 or cy < 0:
            raise ValueError(f"camera coordinates must be non-negative, got {(cx, cy)}")


@dataclass(frozen=True)
class CalibrationParams:
    """Fitted transform parameters.

    theta0 is the rotation angle in radians, theta1/theta2 the axis scales in
    meters per pixel (both positive), theta3/theta4 the offset in meters.
    `residual` is the total calibration error in meters (sum of per-marker
    residual norms at the fitted parameters).
    """

    theta0: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    residual: float = 0.0

    def __post_init__(self):
        if self.theta1 <= 0 or self.theta2 <= 0:
            raise ValueError(f"scales must be positive, got {(self.theta1, self.theta2)}")
        if self.residual < 0:
            raise ValueError("residual must be non-negative")

    @property
    def transform(self) -> np.ndarray:
        """The 2x2 scaled rotation T."""
        c, s = math.cos(self.theta0), math.sin(self.theta0)
        return np.array([[self.theta1 * c, -self.theta2 * s], [self.theta1 * s, self.theta2 * c]])

    @property
    def offset(self) -> np.ndarray:
        return np.array([self.theta3, self.theta4])


def _as_point_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    robot = np.array([p.robot_xy for p in pairs], dtype=float)
    camera = np.array([p.camera_xy for p in pairs], dtype=float)
    return robot, camera


def _check_camera_rank(camera: np.ndarray):
    centered = camera - camera.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[1] <= 1e-9 * max(1.0, sv[0]):
        raise RankDeficiencyError(
            "camera points are collinear or coincident; place markers spanning the board"
        )


def _residual_and_jacobian(theta: np.ndarray, robot: np.ndarray, camera: np.ndarray):
    t0, t1, t2, t3, t4 = theta
    c, s = math.cos(t0), math.sin(t0)
    u, v = camera[:, 0], camera[:, 1]
    # r = offset + p_robot - T @ p_camera, stacked (x parts then y parts)
    rx = t3 + robot[:, 0] - (t1 * c * u - t2 * s * v)
    ry = t4 + robot[:, 1] - (t1 * s * u + t2 * c * v)
    n = len(u)
    J = np.zeros((2 * n, 5))
    J[:n, 0] = t1 * s * u + t2 * c * v
    J[n:, 0] = -t1 * c * u + t2 * s * v
    J[:n, 1] = -c * u
    J[n:, 1] = -s * u
    J[:n, 2] = s * v
    J[n:, 2] = -c * v
    J[:n, 3] = 1.0
    J[n:, 4] = 1.0
    return np.concatenate([rx, ry]), J


def _gauss_newton(theta0: np.ndarray, robot: np.ndarray, camera: np.ndarray):
    """Damped (Levenberg) Gauss-Newton from one start.

    Returns (theta, converged, objective_history); the history is the squared
    objective after every accepted iterate and never increases.
    """
    theta = theta0.copy()
    r, J = _residual_and_jacobian(theta, robot, camera)
    obj = float(r @ r)
    history = [obj]
    lam = 1e-3
    converged = False
    for _ in range(MAX_ITERATIONS):
        g = J.T @ r
        H = J.T @ J
        accepted = False
        for _ in range(30):
            try:
                step = np.linalg.solve(H + lam * np.eye(5), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            r_new, J_new = _residual_and_jacobian(theta + step, robot, camera)
            obj_new = float(r_new @ r_new)
            if obj_new <= obj:
                theta = theta + step
                r, J, obj = r_new, J_new, obj_new
                history.append(obj)
                lam = max(lam * 0.3, 1e-12)
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
        if float(np.linalg.norm(step)) < STEP_TOLERANCE:
            converged = True
            break
    return theta, converged, history


def _normalize(theta: np.ndarray) -> np.ndarray:
    t0, t1, t2, t3, t4 = theta
    if t1 < 0 and t2 < 0:
        t0, t1, t2 = t0 + math.pi, -t1, -t2
    t0 = math.atan2(math.sin(t0), math.cos(t0))
    if t0 <= -math.pi:
        t0 = math.pi
    return np.array([t0, t1, t2, t3, t4])


def _make_params(theta: np.ndarray, robot: np.ndarray, camera: np.ndarray) -> CalibrationParams:
    r, _ = _residual_and_jacobian(theta, robot, camera)
    n = len(robot)
    norms = np.hypot(r[:n], r[n:])
    return CalibrationParams(*map(float, theta), residual=float(norms.sum()))


def fit_calibration(pairs) -> CalibrationParams:
    """Fit the pixel-to-robot transform from at least four marker pairs.

    Raises InsufficientDataError with fewer than four pairs,
    RankDeficiencyError when the camera points do not span the plane, and
    ConvergenceError (carrying the best iterate) if no start converges.
    """
    pairs = list(pairs)
    if len(pairs) < MIN_PAIRS:
        raise InsufficientDataError(f"need at least {MIN_PAIRS} marker pairs, got {len(pairs)}")
    robot, camera = _as_point_arrays(pairs)
    _check_camera_rank(camera)

    spread_r = float(np.sqrt(((robot - robot.mean(axis=0)) ** 2).sum(axis=1).mean()))
    spread_c = float(np.sqrt(((camera - camera.mean(axis=0)) ** 2).sum(axis=1).mean()))
    scale0 = spread_r / spread_c if spread_c > 0 else 1.0
    scale0 = max(scale0, 1e-12)

    best = None
    best_fallback = None
    for angle in ANGLE_STARTS:
        c, s = math.cos(angle), math.sin(angle)
        T0 = np.array([[scale0 * c, -scale0 * s], [scale0 * s, scale0 * c]])
        delta0 = T0 @ camera.mean(axis=0) - robot.mean(axis=0)
        start = np.array([angle, scale0, scale0, delta0[0], delta0[1]])
        theta, converged, _ = _gauss_newton(start, robot, camera)
        theta = _normalize(theta)
        r, _ = _residual_and_jacobian(theta, robot, camera)
        obj = float(r @ r)
        if theta[1] > 0 and theta[2] > 0:
            if converged and (best is None or obj < best[1]):
                best = (theta, obj)
            if best_fallback is None or obj < best_fallback[1]:
                best_fallback = (theta, obj)
    if best is None:
        if best_fallback is None:
            raise RankDeficiencyError("no admissible solution; camera data may be mirrored")
        raise ConvergenceError(
            f"no start converged within {MAX_ITERATIONS} iterations",
            _make_params(best_fallback[0], robot, camera),
        )
    return _make_params(best[0], robot, camera)


def pixel_to_robot(params: CalibrationParams, camera_xy) -> np.ndarray:
    """Map camera pixel coordinates to robot coordinates: T @ p - offset.

    Accepts a single 2-vector or an (n, 2) batch.
    """
    p = np.asarray(camera_xy, dtype=float)
    return p @ params.transform.T - params.offset


def calibration_residual(params: CalibrationParams, pairs) -> float:
    """Total calibration error in meters: sum of per-marker residual norms."""
    robot, camera = _as_point_arrays(list(pairs))
    pred = pixel_to_robot(params, camera)
    return float(np.hypot(*(robot - pred).T).sum())


# --- text interfaces -------------------------------------------------------

def read_pairs_text(text: str) -> list[MarkerPair]:
    """Parse a marker-pair table: one `rx ry cx cy` line per pair, '#' comments."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields 'rx ry cx cy', got {len(fields)}")
        try:
            rx, ry, cx, cy = map(float, fields)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        pairs.append(MarkerPair((rx, ry), (cx, cy)))
    return pairs


def write_pairs_text(pairs) -> str:
    lines = ["# rx ry cx cy"]
    for p in pairs:
        fields = (*p.robot_xy, *p.camera_xy)
        lines.append(" ".join(repr(float(v)) for v in fields))
    return "\n".join(lines) + "\n"


def params_to_text(params: CalibrationParams) -> str:
    fields = ["theta0", "theta1", "theta2", "theta3", "theta4", "residual"]
    return "".join(f"{name}={float(getattr(params, name))!r}\n" for name in fields)


def params_from_text(text: str) -> CalibrationParams:
    values = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = float(value)
    return CalibrationParams(**values)
